// Command-line front end: terrain generation and inspection, single-shot
// geolocation, stare solving, Monte Carlo error sweeps, scenario execution,
// test taxonomy reports, and the frame-convention calibration.

#include "tds/error.hpp"
#include "tds/geolocate.hpp"
#include "tds/optics.hpp"
#include "tds/scenario.hpp"
#include "tds/taxonomy.hpp"
#include "tds/terrain.hpp"
#include "tds/uncertainty.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using tds::geodesy::Datum;
using tds::geodesy::GeodeticPosition;

constexpr std::uint64_t kDefaultSeed = 1729; // fixed default for reproducibility

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> split_doubles(const std::string& s, std::size_t expect_min,
                                  std::size_t expect_max, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw tds::ValidationError("cannot parse " + what + ": '" + s + "'");
        }
    }
    if (out.size() < expect_min || out.size() > expect_max)
        throw tds::ValidationError(what + " expects " + std::to_string(expect_min) + ".." +
                                   std::to_string(expect_max) + " comma-separated numbers");
    return out;
}

GeodeticPosition parse_position(const std::string& s, const std::string& what) {
    // LAT,LON,ALT[,DATUM]
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (parts.size() != 3 && parts.size() != 4)
        throw tds::ValidationError(what + " expects LAT,LON,ALT[,DATUM]");
    Datum d = parts.size() == 4 ? tds::geodesy::datum_from_name(parts[3])
                                : Datum::ELLIPSOID_WGS84;
    try {
        return GeodeticPosition(std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]), d);
    } catch (const tds::Error&) {
        throw;
    } catch (...) {
        throw tds::ValidationError("cannot parse " + what + ": '" + s + "'");
    }
}

struct PoseArgs {
    std::string drone;
    std::string quat;
    double yaw = 0, pitch = 0, roll = 0;
    bool have_euler = false;

    tds::geolocate::VehicleState state() const {
        tds::geolocate::VehicleState st;
        st.position = parse_position(drone, "--drone");
        if (!quat.empty()) {
            auto q = split_doubles(quat, 4, 4, "--quat");
            st.attitude = tds::optics::GimbalState::from_quaternion({q[0], q[1], q[2], q[3]});
        } else if (have_euler) {
            st.attitude = tds::optics::GimbalState::from_euler(yaw, pitch, roll);
        } else {
            throw tds::ValidationError("need --quat X,Y,Z,W or --yaw/--pitch[/--roll]");
        }
        return st;
    }
};

tds::optics::CameraModel parse_camera(double fov_h, const std::string& res) {
    auto x = res.find('x');
    if (x == std::string::npos)
        throw tds::ValidationError("--res expects WxH, e.g. 1920x1080");
    try {
        return tds::optics::CameraModel(fov_h, std::stoi(res.substr(0, x)),
                                        std::stoi(res.substr(x + 1)));
    } catch (const tds::Error&) {
        throw;
    } catch (...) {
        throw tds::ValidationError("cannot parse --res: '" + res + "'");
    }
}

tds::uncertainty::NoiseModel parse_noise(const std::string& spec) {
    if (spec.empty()) return {};
    for (const auto& name : tds::uncertainty::noise_preset_names())
        if (spec == name) return tds::uncertainty::noise_preset(spec);
    return tds::uncertainty::noise_from_json_file(spec);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw tds::Error("cannot open for writing: " + out_path);
        f << text;
        if (!text.empty() && text.back() != '\n') f << "\n";
    }
}

json geolocation_json(const tds::geolocate::GeolocationResult& r) {
    json j;
    j["status"] = tds::geolocate::status_name(r.status);
    if (r.status == tds::geolocate::GeoStatus::HIT) {
        j["hit"] = {{"latitude_deg", r.hit.latitude_deg},
                    {"longitude_deg", r.hit.longitude_deg},
                    {"altitude_m", r.hit.altitude_m},
                    {"datum", tds::geodesy::datum_name(r.hit.datum)}};
        j["cell"] = {r.cell_row, r.cell_col};
        j["ray_length_m"] = r.ray_length_m;
    }
    j["iterations"] = r.iterations;
    return j;
}

std::string geolocation_text(const tds::geolocate::GeolocationResult& r, bool csv) {
    std::ostringstream out;
    if (csv) {
        out << "status,latitude_deg,longitude_deg,altitude_m,datum,cell_row,cell_col,"
               "ray_length_m,iterations\n";
        out << tds::geolocate::status_name(r.status) << ",";
        if (r.status == tds::geolocate::GeoStatus::HIT)
            out << fmt17(r.hit.latitude_deg) << "," << fmt17(r.hit.longitude_deg) << ","
                << fmt17(r.hit.altitude_m) << "," << tds::geodesy::datum_name(r.hit.datum) << ","
                << r.cell_row << "," << r.cell_col << "," << fmt17(r.ray_length_m);
        else
            out << ",,,,,,";
        out << "," << r.iterations << "\n";
    } else {
        out << "status       " << tds::geolocate::status_name(r.status) << "\n";
        if (r.status == tds::geolocate::GeoStatus::HIT) {
            out << "latitude     " << fmt17(r.hit.latitude_deg) << "\n";
            out << "longitude    " << fmt17(r.hit.longitude_deg) << "\n";
            out << "altitude_m   " << fmt17(r.hit.altitude_m) << "\n";
            out << "datum        " << tds::geodesy::datum_name(r.hit.datum) << "\n";
            out << "cell         " << r.cell_row << "," << r.cell_col << "\n";
            out << "ray_length_m " << fmt17(r.ray_length_m) << "\n";
        }
        out << "iterations   " << r.iterations << "\n";
    }
    return out.str();
}

int run(int argc, char** argv) {
    CLI::App app{"terrain digital shadow toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string format = "table";
    app.add_option("--format", format, "output format: json, csv, or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));

    // ---- terrain gen / info -------------------------------------------------
    auto* terrain_cmd = app.add_subcommand("terrain", "generate or inspect terrain grids");
    terrain_cmd->require_subcommand(1);

    auto* gen = terrain_cmd->add_subcommand("gen", "generate a synthetic terrain grid");
    std::string gen_kind = "flat", gen_out, gen_region, gen_cell, gen_datum = "ELLIPSOID_WGS84";
    double gen_elev = 274.0, gen_ripple = 0.8, gen_depth = 6.0, gen_rise = 16.0;
    gen->add_option("--kind", gen_kind, "flat, gully, hill, ridge, or peaks");
    gen->add_option("--elev", gen_elev, "base elevation in meters");
    gen->add_option("--ripple", gen_ripple, "flat-terrain ripple, peak to peak [m]");
    gen->add_option("--depth", gen_depth, "gully depth [m]");
    gen->add_option("--rise", gen_rise, "hill rise [m]");
    gen->add_option("--region", gen_region, "LAT0,LON0,LAT1,LON1 (default site region)");
    gen->add_option("--cell-size", gen_cell, "DLAT,DLON in degrees (default 1e-4,1e-4)");
    gen->add_option("--datum", gen_datum, "ELLIPSOID_WGS84 or AMSL");
    gen->add_option("--out", gen_out, "output grid path")->required();

    auto* info = terrain_cmd->add_subcommand("info", "summarize a terrain grid file");
    std::string info_grid, info_out;
    info->add_option("--grid", info_grid, "grid path")->required();
    info->add_option("--out", info_out, "write output here instead of stdout");

    // ---- geolocate ----------------------------------------------------------
    auto* geo = app.add_subcommand("geolocate", "pixel or bbox to ground coordinates");
    std::string geo_grid, geo_pixel, geo_bbox, geo_out;
    PoseArgs geo_pose;
    double geo_fov = 74.0;
    std::string geo_res = "1920x1080";
    geo->add_option("--grid", geo_grid, "terrain grid path")->required();
    geo->add_option("--drone", geo_pose.drone, "LAT,LON,ALT[,DATUM]")->required();
    geo->add_option("--quat", geo_pose.quat, "camera orientation quaternion X,Y,Z,W");
    geo->add_option("--yaw", geo_pose.yaw, "vehicle yaw [deg, compass]");
    auto* geo_pitch = geo->add_option("--pitch", geo_pose.pitch, "gimbal pitch [deg]");
    geo->add_option("--roll", geo_pose.roll, "gimbal roll [deg]");
    geo->add_option("--fov-h", geo_fov, "horizontal field of view [deg]");
    geo->add_option("--res", geo_res, "image resolution WxH");
    geo->add_option("--pixel", geo_pixel, "pixel X,Y");
    geo->add_option("--bbox", geo_bbox, "detection bbox X0,Y0,X1,Y1");
    geo->add_option("--out", geo_out, "write output here instead of stdout");

    // ---- stare --------------------------------------------------------------
    auto* stare = app.add_subcommand("stare", "yaw/pitch command to aim at a target");
    std::string stare_drone, stare_target, stare_out;
    double pitch_min = -120.0, pitch_max = 30.0;
    stare->add_option("--drone", stare_drone, "LAT,LON,ALT[,DATUM]")->required();
    stare->add_option("--target", stare_target, "LAT,LON,ALT[,DATUM]")->required();
    stare->add_option("--pitch-min", pitch_min, "gimbal pitch lower limit [deg]");
    stare->add_option("--pitch-max", pitch_max, "gimbal pitch upper limit [deg]");
    stare->add_option("--out", stare_out, "write output here instead of stdout");

    // ---- montecarlo ---------------------------------------------------------
    auto* mc = app.add_subcommand("montecarlo", "error statistics under injected noise");
    std::string mc_grid, mc_pixel, mc_bbox, mc_noise = "zero", mc_truth, mc_out, mc_csv;
    PoseArgs mc_pose;
    double mc_fov = 74.0;
    std::string mc_res = "1920x1080";
    int mc_trials = 1000;
    std::uint64_t mc_seed = kDefaultSeed;
    mc->add_option("--grid", mc_grid, "terrain grid path")->required();
    mc->add_option("--drone", mc_pose.drone, "LAT,LON,ALT[,DATUM]")->required();
    mc->add_option("--quat", mc_pose.quat, "camera orientation quaternion X,Y,Z,W");
    mc->add_option("--yaw", mc_pose.yaw, "vehicle yaw [deg, compass]");
    auto* mc_pitch = mc->add_option("--pitch", mc_pose.pitch, "gimbal pitch [deg]");
    mc->add_option("--roll", mc_pose.roll, "gimbal roll [deg]");
    mc->add_option("--fov-h", mc_fov, "horizontal field of view [deg]");
    mc->add_option("--res", mc_res, "image resolution WxH");
    mc->add_option("--pixel", mc_pixel, "pixel X,Y");
    mc->add_option("--bbox", mc_bbox, "detection bbox X0,Y0,X1,Y1");
    mc->add_option("--noise", mc_noise,
                   "noise preset name or JSON path (presets: zero, ground_hover, "
                   "airborne_hover, altitude_bias_high, altitude_bias_low, field)");
    mc->add_option("--trials", mc_trials, "number of trials");
    mc->add_option("--seed", mc_seed, "random seed");
    mc->add_option("--truth", mc_truth, "truth LAT,LON,ALT[,DATUM]; default: noise-free hit");
    mc->add_option("--out", mc_out, "write summary here instead of stdout");
    mc->add_option("--csv", mc_csv, "write per-trial records CSV here");

    // ---- scenario run -------------------------------------------------------
    auto* scen = app.add_subcommand("scenario", "scripted multi-agent scenarios");
    scen->require_subcommand(1);
    auto* scen_run = scen->add_subcommand("run", "execute a scenario file");
    std::string scen_file, scen_out, scen_csv;
    scen_run->add_option("--file", scen_file, "scenario JSON path")->required();
    scen_run->add_option("--out", scen_out, "write report JSON here instead of stdout");
    scen_run->add_option("--csv", scen_csv, "write per-event CSV here");

    // ---- report -------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "test taxonomy coverage report");
    std::string rep_results, rep_out;
    bool rep_builtin = false;
    rep->add_option("--results", rep_results, "JSON file of externally tagged results");
    rep->add_flag("--builtin", rep_builtin, "run and include the built-in tagged suite");
    rep->add_option("--out", rep_out, "write output here instead of stdout");

    // ---- calibrate-frames ---------------------------------------------------
    auto* calib = app.add_subcommand(
        "calibrate-frames", "enumerate quaternion/camera/world conventions against the anchor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            tds::terrain::SynthParams p;
            if (!gen_region.empty()) {
                auto r = split_doubles(gen_region, 4, 4, "--region");
                p.lat_min = r[0];
                p.lon_min = r[1];
                p.lat_max = r[2];
                p.lon_max = r[3];
            }
            if (!gen_cell.empty()) {
                auto c = split_doubles(gen_cell, 2, 2, "--cell-size");
                p.cell_dlat = c[0];
                p.cell_dlon = c[1];
            }
            p.base_elevation_m = gen_elev;
            p.ripple_m = gen_ripple;
            p.depth_m = gen_depth;
            p.rise_m = gen_rise;
            p.datum = tds::geodesy::datum_from_name(gen_datum);
            auto grid = tds::terrain::synth_terrain(tds::terrain::synth_kind_from_name(gen_kind), p);
            tds::terrain::save_grid(grid, gen_out);
            std::cout << "wrote " << gen_out << " (" << grid.rows() << "x" << grid.cols()
                      << " cells)\n";
        } else if (info->parsed()) {
            auto grid = tds::terrain::load_grid(info_grid);
            std::map<std::string, int> hist;
            for (int r = 0; r < grid.rows(); ++r)
                for (int c = 0; c < grid.cols(); ++c)
                    ++hist[tds::terrain::land_cover_name(grid.land_cover(r, c))];
            if (format == "json") {
                json j;
                j["rows"] = grid.rows();
                j["cols"] = grid.cols();
                j["region"] = {grid.lat0(), grid.lon0(), grid.lat1(), grid.lon1()};
                j["cell_size_deg"] = {grid.dlat(), grid.dlon()};
                j["datum"] = tds::geodesy::datum_name(grid.datum());
                j["min_elevation_m"] = grid.min_elevation();
                j["max_elevation_m"] = grid.max_elevation();
                j["land_cover_histogram"] = hist;
                j["feature_count"] = grid.features().size();
                emit(j.dump(1), info_out);
            } else {
                std::ostringstream out;
                out << "rows x cols    " << grid.rows() << " x " << grid.cols() << "\n";
                out << "region         " << fmt17(grid.lat0()) << "," << fmt17(grid.lon0()) << " .. "
                    << fmt17(grid.lat1()) << "," << fmt17(grid.lon1()) << "\n";
                out << "cell size      " << fmt17(grid.dlat()) << "," << fmt17(grid.dlon()) << "\n";
                out << "datum          " << tds::geodesy::datum_name(grid.datum()) << "\n";
                out << "min elevation  " << fmt17(grid.min_elevation()) << "\n";
                out << "max elevation  " << fmt17(grid.max_elevation()) << "\n";
                out << "features       " << grid.features().size() << "\n";
                for (const auto& [name, count] : hist)
                    out << "cover " << name << ": " << count << "\n";
                emit(out.str(), info_out);
            }
        } else if (geo->parsed()) {
            geo_pose.have_euler = geo_pitch->count() > 0;
            auto grid = tds::terrain::load_grid(geo_grid);
            auto cam = parse_camera(geo_fov, geo_res);
            auto state = geo_pose.state();
            tds::geolocate::GeolocationResult res;
            if (!geo_bbox.empty()) {
                auto b = split_doubles(geo_bbox, 4, 4, "--bbox");
                res = tds::geolocate::geolocate_detection(grid, state, cam, b[0], b[1], b[2], b[3]);
            } else if (!geo_pixel.empty()) {
                auto px = split_doubles(geo_pixel, 2, 2, "--pixel");
                res = tds::geolocate::geolocate_pixel(grid, state, cam, px[0], px[1]);
            } else {
                throw tds::ValidationError("need --pixel or --bbox");
            }
            if (format == "json")
                emit(geolocation_json(res).dump(), geo_out);
            else
                emit(geolocation_text(res, format == "csv"), geo_out);
        } else if (stare->parsed()) {
            tds::optics::GimbalLimits limits;
            limits.pitch_min_deg = pitch_min;
            limits.pitch_max_deg = pitch_max;
            auto cmd = tds::optics::stare_solution(parse_position(stare_drone, "--drone"),
                                                   parse_position(stare_target, "--target"), limits);
            if (format == "json") {
                json j = {{"vehicle_yaw_deg", cmd.vehicle_yaw_deg},
                          {"gimbal_pitch_deg", cmd.gimbal_pitch_deg},
                          {"gimbal_roll_deg", cmd.gimbal_roll_deg},
                          {"reachable", cmd.reachable}};
                emit(j.dump(), stare_out);
            } else {
                std::ostringstream out;
                out << "vehicle_yaw_deg  " << fmt17(cmd.vehicle_yaw_deg) << "\n";
                out << "gimbal_pitch_deg " << fmt17(cmd.gimbal_pitch_deg) << "\n";
                out << "gimbal_roll_deg  " << fmt17(cmd.gimbal_roll_deg) << "\n";
                out << "reachable        " << (cmd.reachable ? "true" : "false") << "\n";
                emit(out.str(), stare_out);
            }
        } else if (mc->parsed()) {
            mc_pose.have_euler = mc_pitch->count() > 0;
            auto grid = tds::terrain::load_grid(mc_grid);
            tds::uncertainty::Scene scene;
            scene.state = mc_pose.state();
            scene.camera = parse_camera(mc_fov, mc_res);
            if (!mc_bbox.empty()) {
                auto b = split_doubles(mc_bbox, 4, 4, "--bbox");
                scene.bbox = {{b[0], b[1], b[2], b[3]}};
            } else if (!mc_pixel.empty()) {
                auto px = split_doubles(mc_pixel, 2, 2, "--pixel");
                scene.pixel_x = px[0];
                scene.pixel_y = px[1];
            } else {
                throw tds::ValidationError("need --pixel or --bbox");
            }
            GeodeticPosition truth;
            if (!mc_truth.empty()) {
                truth = parse_position(mc_truth, "--truth");
            } else {
                double px = scene.bbox ? 0.5 * ((*scene.bbox)[0] + (*scene.bbox)[2]) : scene.pixel_x;
                double py = scene.bbox ? 0.5 * ((*scene.bbox)[1] + (*scene.bbox)[3]) : scene.pixel_y;
                auto nominal = tds::geolocate::geolocate_pixel(grid, scene.state, scene.camera, px, py);
                if (nominal.status != tds::geolocate::GeoStatus::HIT)
                    throw tds::ValidationError("noise-free geolocation misses (" +
                                               tds::geolocate::status_name(nominal.status) +
                                               "); pass --truth explicitly");
                truth = nominal.hit;
            }
            auto noise = parse_noise(mc_noise);
            auto stats = tds::uncertainty::monte_carlo_geolocation(grid, scene, truth, noise,
                                                                   mc_trials, mc_seed);
            if (!mc_csv.empty()) emit(tds::uncertainty::error_stats_csv(stats), mc_csv);
            if (format == "json") {
                json j = {{"n", stats.n},
                          {"mean_haversine_m", stats.mean_haversine_m},
                          {"max_haversine_m", stats.max_haversine_m},
                          {"mean_abs_elevation_err_m", stats.mean_abs_elevation_err_m},
                          {"max_abs_elevation_err_m", stats.max_abs_elevation_err_m},
                          {"miss_count", stats.miss_count},
                          {"truth", {truth.latitude_deg, truth.longitude_deg, truth.altitude_m}}};
                emit(j.dump(), mc_out);
            } else if (format == "csv") {
                std::ostringstream out;
                out << "n,mean_haversine_m,max_haversine_m,mean_abs_elevation_err_m,"
                       "max_abs_elevation_err_m,miss_count\n"
                    << stats.n << "," << fmt17(stats.mean_haversine_m) << ","
                    << fmt17(stats.max_haversine_m) << "," << fmt17(stats.mean_abs_elevation_err_m)
                    << "," << fmt17(stats.max_abs_elevation_err_m) << "," << stats.miss_count
                    << "\n";
                emit(out.str(), mc_out);
            } else {
                std::ostringstream out;
                out << "trials               " << stats.n << "\n";
                out << "mean haversine [m]   " << fmt17(stats.mean_haversine_m) << "\n";
                out << "max haversine [m]    " << fmt17(stats.max_haversine_m) << "\n";
                out << "mean |elev err| [m]  " << fmt17(stats.mean_abs_elevation_err_m) << "\n";
                out << "max |elev err| [m]   " << fmt17(stats.max_abs_elevation_err_m) << "\n";
                out << "misses               " << stats.miss_count << "\n";
                emit(out.str(), mc_out);
            }
        } else if (scen_run->parsed()) {
            auto scenario = tds::harness::scenario_from_json_file(scen_file);
            auto report = tds::harness::run_scenario(scenario);
            if (!scen_csv.empty()) emit(report.events_csv(), scen_csv);
            emit(report.to_json(), scen_out);
            if (!report.passed) return 3;
        } else if (rep->parsed()) {
            std::vector<tds::harness::TaggedResult> results;
            if (rep_builtin) results = tds::harness::builtin_suite();
            if (!rep_results.empty()) {
                auto ext = tds::harness::results_from_json_file(rep_results);
                results.insert(results.end(), ext.begin(), ext.end());
            }
            auto taxonomy = tds::harness::taxonomy_report(results);
            if (format == "json")
                emit(tds::harness::taxonomy_to_json(taxonomy), rep_out);
            else
                emit(tds::harness::taxonomy_to_table(taxonomy), rep_out);
        } else if (calib->parsed()) {
            auto outcome = tds::optics::calibrate_frame_convention();
            if (format == "json") {
                json j;
                j["candidates_within_gate"] = outcome.matches.size();
                j["unique"] = outcome.unique;
                j["best_residual_m"] = outcome.best_residual_m;
                j["selected"] = outcome.selected.describe();
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "conventions within 0.5 m: " << outcome.matches.size() << "\n";
                for (const auto& [conv, residual] : outcome.matches)
                    std::cout << "  " << conv.describe() << "  residual "
                              << fmt17(residual) << " m\n";
                std::cout << "selected: " << outcome.selected.describe() << "\n";
                std::cout << "residual: " << fmt17(outcome.best_residual_m) << " m\n";
                std::cout << "unique:   " << (outcome.unique ? "true" : "false") << "\n";
            }
            if (!outcome.unique) return 2;
        }
        return 0;
    } catch (const tds::Error& e) {
        if (format == "json") {
            json j = {{"error", e.what()}};
            std::cerr << j.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
