#include "tds/taxonomy.hpp"

#include "tds/error.hpp"
#include "tds/geolocate.hpp"
#include "tds/optics.hpp"
#include "tds/scenario.hpp"
#include "tds/terrain.hpp"
#include "tds/uncertainty.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tds::harness {

std::string level_name(TestLevel l) {
    switch (l) {
        case TestLevel::UNIT: return "UNIT";
        case TestLevel::INTEGRATION: return "INTEGRATION";
        case TestLevel::SYSTEM: return "SYSTEM";
        case TestLevel::ACCEPTANCE: return "ACCEPTANCE";
    }
    return "UNIT";
}

std::string fidelity_name(Fidelity f) {
    switch (f) {
        case Fidelity::SIL: return "SIL";
        case Fidelity::HIL: return "HIL";
        case Fidelity::REAL: return "REAL";
    }
    return "SIL";
}

std::string complexity_name(Complexity c) {
    switch (c) {
        case Complexity::SIMPLE: return "SIMPLE";
        case Complexity::MODERATE: return "MODERATE";
        case Complexity::EDGE: return "EDGE";
    }
    return "SIMPLE";
}

TestLevel level_from_name(const std::string& s) {
    if (s == "UNIT") return TestLevel::UNIT;
    if (s == "INTEGRATION") return TestLevel::INTEGRATION;
    if (s == "SYSTEM") return TestLevel::SYSTEM;
    if (s == "ACCEPTANCE") return TestLevel::ACCEPTANCE;
    throw ValidationError("unknown test level: " + s);
}

Fidelity fidelity_from_name(const std::string& s) {
    if (s == "SIL") return Fidelity::SIL;
    if (s == "HIL") return Fidelity::HIL;
    if (s == "REAL") return Fidelity::REAL;
    throw ValidationError("unknown fidelity: " + s);
}

Complexity complexity_from_name(const std::string& s) {
    if (s == "SIMPLE") return Complexity::SIMPLE;
    if (s == "MODERATE") return Complexity::MODERATE;
    if (s == "EDGE") return Complexity::EDGE;
    throw ValidationError("unknown complexity: " + s);
}

void TestTag::validate_scenario_tag() const {
    if (challenges.empty())
        throw ValidationError("scenario-level tests must name at least one challenge");
    for (int c : challenges)
        if (c < 1 || c > 8) throw ValidationError("challenge id out of range 1..8");
}

TaxonomyReport taxonomy_report(const std::vector<TaggedResult>& results) {
    TaxonomyReport rep;
    for (const TaggedResult& r : results) {
        auto& cell = rep.matrix[static_cast<int>(r.tag.level)][static_cast<int>(r.tag.fidelity)]
                               [static_cast<int>(r.tag.complexity)];
        ++cell.total;
        ++rep.total;
        if (r.passed) {
            ++cell.passed;
            ++rep.total_passed;
            for (int c : r.tag.challenges)
                if (c >= 1 && c <= 8) rep.challenge_covered[c - 1] = true;
        }
    }
    return rep;
}

std::string taxonomy_to_json(const TaxonomyReport& rep) {
    nlohmann::json j;
    j["total"] = rep.total;
    j["total_passed"] = rep.total_passed;
    nlohmann::json cells = nlohmann::json::array();
    for (int l = 0; l < 4; ++l)
        for (int f = 0; f < 3; ++f)
            for (int c = 0; c < 3; ++c) {
                const auto& cell = rep.matrix[l][f][c];
                if (cell.total == 0) continue;
                cells.push_back({{"level", level_name(static_cast<TestLevel>(l))},
                                 {"fidelity", fidelity_name(static_cast<Fidelity>(f))},
                                 {"complexity", complexity_name(static_cast<Complexity>(c))},
                                 {"total", cell.total},
                                 {"passed", cell.passed}});
            }
    j["matrix"] = std::move(cells);
    nlohmann::json covered = nlohmann::json::array();
    nlohmann::json uncovered = nlohmann::json::array();
    for (int i = 0; i < 8; ++i) {
        std::string name = "C" + std::to_string(i + 1);
        (rep.challenge_covered[i] ? covered : uncovered).push_back(name);
    }
    j["challenges_covered"] = std::move(covered);
    j["challenges_uncovered"] = std::move(uncovered);
    return j.dump(1);
}

std::string taxonomy_to_table(const TaxonomyReport& rep) {
    std::ostringstream out;
    out << "level        fidelity  complexity  passed/total\n";
    for (int l = 0; l < 4; ++l)
        for (int f = 0; f < 3; ++f)
            for (int c = 0; c < 3; ++c) {
                const auto& cell = rep.matrix[l][f][c];
                if (cell.total == 0) continue;
                char line[96];
                std::snprintf(line, sizeof(line), "%-12s %-9s %-11s %d/%d\n",
                              level_name(static_cast<TestLevel>(l)).c_str(),
                              fidelity_name(static_cast<Fidelity>(f)).c_str(),
                              complexity_name(static_cast<Complexity>(c)).c_str(), cell.passed,
                              cell.total);
                out << line;
            }
    out << "challenge coverage:";
    for (int i = 0; i < 8; ++i)
        out << " C" << (i + 1) << (rep.challenge_covered[i] ? "=covered" : "=uncovered");
    out << "\n";
    return out.str();
}

std::vector<TaggedResult> results_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open results file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed results file " + path + ": " + e.what());
    }
    if (!j.is_array()) throw ParseError("results file must be a JSON array");
    std::vector<TaggedResult> out;
    for (const auto& e : j) {
        TaggedResult r;
        r.name = e.at("name").get<std::string>();
        r.tag.level = level_from_name(e.at("level").get<std::string>());
        r.tag.fidelity = fidelity_from_name(e.at("fidelity").get<std::string>());
        r.tag.complexity = complexity_from_name(e.at("complexity").get<std::string>());
        for (const auto& c : e.at("challenges")) r.tag.challenges.insert(c.get<int>());
        r.passed = e.at("passed").get<bool>();
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in tagged suite

namespace {

using geodesy::Datum;
using geodesy::GeodeticPosition;
using geolocate::GeoStatus;
using terrain::SynthKind;
using terrain::SynthParams;

SynthParams small_region() {
    SynthParams p;
    p.lat_min = 36.2100;
    p.lat_max = 36.2140;
    p.lon_min = -96.0100;
    p.lon_max = -96.0040;
    return p;
}

/// Reference geolocation anchor reproduced through the full pipeline.
TaggedResult check_anchor_geolocation() {
    TaggedResult r{"anchor_geolocation",
                   {TestLevel::UNIT, Fidelity::SIL, Complexity::SIMPLE, {3}},
                   false};
    optics::AnchorScene scene = optics::anchor_scene();
    SynthParams p;
    p.base_elevation_m = scene.ground_elevation_m;
    p.ripple_m = 0;
    terrain::TerrainGrid grid = terrain::synth_terrain(SynthKind::FLAT, p);
    geolocate::VehicleState state{
        scene.drone,
        optics::GimbalState::from_quaternion({scene.quat_raw[0], scene.quat_raw[1],
                                              scene.quat_raw[2], scene.quat_raw[3]}),
        0.0};
    auto res = geolocate::geolocate_pixel(grid, state, scene.camera, scene.pixel_x, scene.pixel_y);
    r.passed = res.status == GeoStatus::HIT &&
               geodesy::haversine_m(res.hit, scene.expected_hit) <= 0.5 &&
               std::abs(res.hit.altitude_m - scene.ground_elevation_m) <= 1e-3;
    return r;
}

/// Distance to ground varies across a gully at least as much as its depth.
TaggedResult check_gully_ground_distance() {
    TaggedResult r{"gully_ground_distance",
                   {TestLevel::UNIT, Fidelity::SIL, Complexity::MODERATE, {2}},
                   false};
    SynthParams p = small_region();
    terrain::TerrainGrid grid = terrain::synth_terrain(SynthKind::GULLY, p);
    double flight_alt = p.base_elevation_m + 60.0;
    double trench_lon = p.lon_min + (grid.cols() / 2 + 0.5) * p.cell_dlon;
    double rim_lon = p.lon_min + 1.5 * p.cell_dlon;
    double lat = 0.5 * (p.lat_min + p.lat_max);
    double d_trench = flight_alt - grid.elevation_at(lat, trench_lon, terrain::ElevationMode::BILINEAR);
    double d_rim = flight_alt - grid.elevation_at(lat, rim_lon, terrain::ElevationMode::BILINEAR);
    r.passed = (d_trench - d_rim) >= 0.9 * p.depth_m;
    return r;
}

/// A crest narrower than the cell size placed between sample points vanishes
/// from the coarse model but not a refined one.
TaggedResult check_ridge_subcell() {
    TaggedResult r{"ridge_subcell_alias",
                   {TestLevel::UNIT, Fidelity::SIL, Complexity::EDGE, {1}},
                   false};
    SynthParams p = small_region();
    double base = p.base_elevation_m, height = 8.0, halfwidth = 1.5e-4;
    double coarse_cell = 4e-4;
    // crest centered between the coarse grid's centroid columns
    double crest_lon = p.lon_min + 8 * coarse_cell;
    auto elev = [&](double, double lon) {
        double u = std::abs(lon - crest_lon) / halfwidth;
        return base + height * std::max(0.0, 1.0 - u);
    };
    auto cover = [](double, double) { return terrain::LandCoverClass::grassland; };
    auto coarse = terrain::build_grid(p.lat_min, p.lon_min, p.lat_max, p.lon_max, coarse_cell,
                                      coarse_cell, elev, cover);
    auto fine = terrain::build_grid(p.lat_min, p.lon_min, p.lat_max, p.lon_max, 0.25e-4, 0.25e-4,
                                    elev, cover);
    double missed = fine.max_elevation() - coarse.max_elevation();
    r.passed = missed >= 0.5 * height;
    return r;
}

uncertainty::Scene scene_at_depression(const terrain::TerrainGrid& grid, double depression_deg,
                                       GeodeticPosition& truth_out) {
    double ground = grid.elevation(grid.rows() / 2, grid.cols() / 2);
    GeodeticPosition target(grid.centroid_lat(grid.rows() / 2), grid.centroid_lon(grid.cols() / 2),
                            ground, grid.datum());
    double range_h = 120.0;
    geolocate::LocalProjection proj(target);
    GeodeticPosition drone(target.latitude_deg - range_h / proj.meters_per_deg_lat(),
                           target.longitude_deg, ground + range_h * std::tan(deg2rad(depression_deg)),
                           grid.datum());
    optics::StareCommand cmd = optics::stare_solution(drone, target);
    uncertainty::Scene scene;
    scene.state = {drone,
                   optics::GimbalState::from_euler(cmd.vehicle_yaw_deg, cmd.gimbal_pitch_deg,
                                                   cmd.gimbal_roll_deg),
                   0.0};
    scene.camera = optics::CameraModel(74.0, 1920, 1080);
    scene.pixel_x = scene.camera.width_px / 2.0;
    scene.pixel_y = scene.camera.height_px / 2.0;
    truth_out = target;
    return scene;
}

TaggedResult check_gps_scatter() {
    TaggedResult r{"gps_scatter_error",
                   {TestLevel::INTEGRATION, Fidelity::SIL, Complexity::SIMPLE, {4}},
                   false};
    SynthParams p = small_region();
    p.ripple_m = 0;
    terrain::TerrainGrid grid = terrain::synth_terrain(SynthKind::FLAT, p);
    GeodeticPosition truth;
    auto scene = scene_at_depression(grid, 45.0, truth);
    auto nominal = geolocate::geolocate_pixel(grid, scene.state, scene.camera, scene.pixel_x,
                                              scene.pixel_y);
    if (nominal.status != GeoStatus::HIT) return r;
    uncertainty::NoiseModel noise;
    noise.gps_sigma_h_m = 1.5;
    auto stats = uncertainty::monte_carlo_geolocation(grid, scene, nominal.hit, noise, 2000, 7);
    r.passed = stats.mean_haversine_m > 0.5 && stats.mean_haversine_m < 10.0 &&
               stats.miss_count == 0;
    return r;
}

TaggedResult check_attitude_monotone() {
    TaggedResult r{"attitude_error_monotone",
                   {TestLevel::INTEGRATION, Fidelity::SIL, Complexity::MODERATE, {5}},
                   false};
    SynthParams p = small_region();
    p.ripple_m = 0;
    terrain::TerrainGrid grid = terrain::synth_terrain(SynthKind::FLAT, p);
    GeodeticPosition truth;
    auto scene = scene_at_depression(grid, 40.0, truth);
    auto nominal = geolocate::geolocate_pixel(grid, scene.state, scene.camera, scene.pixel_x,
                                              scene.pixel_y);
    if (nominal.status != GeoStatus::HIT) return r;
    double prev = -1;
    bool monotone = true;
    for (double sigma : {0.1, 0.4, 1.2}) {
        uncertainty::NoiseModel noise;
        noise.attitude_sigma_deg = sigma;
        auto stats = uncertainty::monte_carlo_geolocation(grid, scene, nominal.hit, noise, 1500, 11);
        if (stats.mean_haversine_m <= prev) monotone = false;
        prev = stats.mean_haversine_m;
    }
    r.passed = monotone;
    return r;
}

TaggedResult check_pixel_jitter() {
    TaggedResult r{"pixel_jitter_bounded",
                   {TestLevel::UNIT, Fidelity::SIL, Complexity::SIMPLE, {6}},
                   false};
    SynthParams p = small_region();
    p.ripple_m = 0;
    terrain::TerrainGrid grid = terrain::synth_terrain(SynthKind::FLAT, p);
    GeodeticPosition truth;
    auto scene = scene_at_depression(grid, 50.0, truth);
    auto nominal = geolocate::geolocate_pixel(grid, scene.state, scene.camera, scene.pixel_x,
                                              scene.pixel_y);
    if (nominal.status != GeoStatus::HIT) return r;
    uncertainty::NoiseModel noise;
    noise.pixel_sigma_px = 2.0;
    auto stats = uncertainty::monte_carlo_geolocation(grid, scene, nominal.hit, noise, 1500, 13);
    r.passed = stats.mean_haversine_m > 0 && stats.mean_haversine_m < 2.0 &&
               stats.miss_count == 0;
    return r;
}

/// Stale state lookup: a moving platform geolocating with latency displaces
/// the result by roughly speed * latency.
TaggedResult check_latency_displacement() {
    TaggedResult r{"stale_state_displacement",
                   {TestLevel::SYSTEM, Fidelity::SIL, Complexity::MODERATE, {7}},
                   false};
    SynthParams p = small_region();
    p.ripple_m = 0;

    auto build = [&](double latency_s) {
        Scenario s;
        s.synth = {SynthKind::FLAT, p};
        s.seed = 5;
        s.tag = {TestLevel::SYSTEM, Fidelity::SIL, Complexity::MODERATE, {7}};
        AgentSpec a;
        a.id = "mover";
        a.position = GeodeticPosition(36.2110, -96.0070, p.base_elevation_m + 60.0,
                                      Datum::ELLIPSOID_WGS84);
        a.pitch_deg = -50.0;
        a.yaw_deg = 0.0;
        a.noise.latency_s = latency_s;
        s.agents.push_back(a);

        // fly north ~80 m over 16 s (5 m/s), detect mid-flight
        ScriptEvent mv;
        mv.t = 0;
        mv.type = "move_to";
        mv.agent = "mover";
        mv.position = GeodeticPosition(36.21172, -96.0070, p.base_elevation_m + 60.0,
                                       Datum::ELLIPSOID_WGS84);
        mv.duration_s = 16.0;
        s.script.push_back(mv);

        ScriptEvent det;
        det.t = 10.0;
        det.type = "detect_at_pixel";
        det.agent = "mover";
        det.pixel = {{960.0, 540.0}};
        s.script.push_back(det);
        return s;
    };

    auto rep0 = run_scenario(build(0.0));
    auto rep1 = run_scenario(build(2.0));
    if (!rep0.agents[0].last_geolocation || !rep1.agents[0].last_geolocation) return r;
    double displaced = geodesy::haversine_m(*rep0.agents[0].last_geolocation,
                                            *rep1.agents[0].last_geolocation);
    // 5 m/s * 2 s of staleness
    r.passed = std::abs(displaced - 10.0) < 3.0;
    return r;
}

TaggedResult check_collaborative_relay() {
    TaggedResult r{"collaborative_relay",
                   {TestLevel::SYSTEM, Fidelity::SIL, Complexity::SIMPLE, {3, 4, 7}},
                   false};
    auto rep = run_scenario(make_collaborative_scenario(0.0, 42));
    r.passed = rep.passed;
    return r;
}

} // namespace

std::vector<TaggedResult> builtin_suite() {
    return {
        check_anchor_geolocation(), check_gully_ground_distance(), check_ridge_subcell(),
        check_gps_scatter(),        check_attitude_monotone(),     check_pixel_jitter(),
        check_latency_displacement(), check_collaborative_relay(),
    };
}

} // namespace tds::harness
