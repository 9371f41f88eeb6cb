#include "tds/uncertainty.hpp"

#include "tds/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace tds::uncertainty {

using geolocate::GeolocationResult;
using geolocate::GeoStatus;
using geolocate::VehicleState;

void NoiseModel::validate() const {
    if (gps_sigma_h_m < 0 || gps_sigma_v_m < 0 || attitude_sigma_deg < 0 || pixel_sigma_px < 0)
        throw ValidationError("noise sigmas must be >= 0");
    if (hdop_scale < 1.0) throw ValidationError("hdop_scale must be >= 1");
    if (!std::isfinite(altitude_bias_m) || !std::isfinite(latency_s))
        throw ValidationError("non-finite noise parameter");
}

NoiseModel noise_preset(const std::string& name) {
    NoiseModel n;
    if (name == "zero") return n;
    if (name == "ground_hover") {
        n.gps_sigma_h_m = 2.0;
        n.gps_sigma_v_m = 1.0;
        return n;
    }
    if (name == "airborne_hover") {
        n.gps_sigma_h_m = 0.65;
        n.gps_sigma_v_m = 0.5;
        return n;
    }
    if (name == "altitude_bias_high") {
        n.altitude_bias_m = 5.5;
        return n;
    }
    if (name == "altitude_bias_low") {
        n.altitude_bias_m = -3.5;
        return n;
    }
    if (name == "field") {
        n.gps_sigma_h_m = 1.5;
        n.gps_sigma_v_m = 1.0;
        n.altitude_bias_m = 3.0;
        n.attitude_sigma_deg = 0.5;
        return n;
    }
    throw ValidationError("unknown noise preset: " + name);
}

std::vector<std::string> noise_preset_names() {
    return {"zero", "ground_hover", "airborne_hover", "altitude_bias_high", "altitude_bias_low",
            "field"};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based trial engine: independent of trial execution order.
std::mt19937_64 trial_engine(std::uint64_t seed, int trial_index, std::uint64_t stream) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial_index) +
                                                   (stream << 32)));
    return std::mt19937_64(s);
}

} // namespace

VehicleState perturb_state(const VehicleState& state, const NoiseModel& noise, int trial_index) {
    noise.validate();
    VehicleState out = state;
    auto rng = trial_engine(noise.seed, trial_index, 0);
    std::normal_distribution<double> unit(0.0, 1.0);

    bool horizontal = noise.gps_sigma_h_m > 0;
    bool vertical = noise.gps_sigma_v_m > 0;
    if (horizontal || vertical || noise.altitude_bias_m != 0) {
        double de = horizontal ? noise.gps_sigma_h_m * noise.hdop_scale * unit(rng) : 0.0;
        double dn = horizontal ? noise.gps_sigma_h_m * noise.hdop_scale * unit(rng) : 0.0;
        double du = (vertical ? noise.gps_sigma_v_m * unit(rng) : 0.0) + noise.altitude_bias_m;
        if (horizontal) {
            geolocate::LocalProjection proj(state.position);
            out.position.longitude_deg += de / proj.meters_per_deg_lon();
            out.position.latitude_deg += dn / proj.meters_per_deg_lat();
        }
        out.position.altitude_m += du;
    }

    if (noise.attitude_sigma_deg > 0) {
        double sx = deg2rad(noise.attitude_sigma_deg) * unit(rng);
        double sy = deg2rad(noise.attitude_sigma_deg) * unit(rng);
        double sz = deg2rad(noise.attitude_sigma_deg) * unit(rng);
        Quaternion dq = Quaternion::from_axis_angle({1, 0, 0}, sx) *
                        Quaternion::from_axis_angle({0, 1, 0}, sy) *
                        Quaternion::from_axis_angle({0, 0, 1}, sz);
        out.attitude.orientation_q = (out.attitude.orientation_q * dq).normalized();
    }
    return out;
}

std::pair<double, double> perturb_pixel(const optics::CameraModel& cam, double px_x, double px_y,
                                        const NoiseModel& noise, int trial_index) {
    if (noise.pixel_sigma_px <= 0) return {px_x, px_y};
    auto rng = trial_engine(noise.seed, trial_index, 1);
    std::normal_distribution<double> unit(0.0, 1.0);
    double x = px_x + noise.pixel_sigma_px * unit(rng);
    double y = px_y + noise.pixel_sigma_px * unit(rng);
    x = std::clamp(x, 0.0, cam.width_px - 1e-9);
    y = std::clamp(y, 0.0, cam.height_px - 1e-9);
    return {x, y};
}

double analytic_bias_error(double bias_m, double depression_angle_deg) {
    if (!(depression_angle_deg > 0) || !(depression_angle_deg < 90))
        throw ValidationError("analytic_bias_error: depression angle must be in (0, 90) deg");
    return std::abs(bias_m) / std::tan(deg2rad(depression_angle_deg));
}

ErrorStats monte_carlo_geolocation(const terrain::TerrainGrid& grid, const Scene& scene,
                                   const geodesy::GeodeticPosition& truth,
                                   const NoiseModel& noise, int trials, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("monte_carlo_geolocation: trials must be >= 1");
    noise.validate();
    NoiseModel effective = noise;
    effective.seed = seed;

    double px = scene.pixel_x, py = scene.pixel_y;
    if (scene.bbox) {
        const auto& b = *scene.bbox;
        if (!(b[0] < b[2]) || !(b[1] < b[3]))
            throw ValidationError("monte_carlo_geolocation: degenerate bbox");
        px = 0.5 * (b[0] + b[2]);
        py = 0.5 * (b[1] + b[3]);
    }

    ErrorStats stats;
    stats.n = trials;
    stats.records.reserve(trials);
    double sum_h = 0, sum_e = 0;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        VehicleState s = perturb_state(scene.state, effective, t);
        auto [jx, jy] = perturb_pixel(scene.camera, px, py, effective, t);
        GeolocationResult res = geolocate::geolocate_pixel(grid, s, scene.camera, jx, jy);
        TrialRecord rec;
        rec.trial = t;
        rec.status = res.status;
        if (res.status == GeoStatus::HIT) {
            rec.d_haversine_m = geodesy::haversine_m(res.hit, truth);
            rec.d_elev_m = std::abs(res.hit.altitude_m - truth.altitude_m);
            sum_h += rec.d_haversine_m;
            sum_e += rec.d_elev_m;
            stats.max_haversine_m = std::max(stats.max_haversine_m, rec.d_haversine_m);
            stats.max_abs_elevation_err_m = std::max(stats.max_abs_elevation_err_m, rec.d_elev_m);
            ++hits;
        } else {
            ++stats.miss_count;
        }
        stats.records.push_back(rec);
    }
    if (hits > 0) {
        stats.mean_haversine_m = sum_h / hits;
        stats.mean_abs_elevation_err_m = sum_e / hits;
    }
    return stats;
}

std::string error_stats_csv(const ErrorStats& stats) {
    std::string out = "trial,d_haversine_m,d_elev_m,status\n";
    char buf[128];
    for (const TrialRecord& r : stats.records) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%s\n", r.trial, r.d_haversine_m,
                      r.d_elev_m, geolocate::status_name(r.status).c_str());
        out += buf;
    }
    return out;
}

NoiseModel noise_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open noise file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed noise file " + path + ": " + e.what());
    }
    NoiseModel n;
    n.gps_sigma_h_m = j.value("gps_sigma_h_m", 0.0);
    n.gps_sigma_v_m = j.value("gps_sigma_v_m", 0.0);
    n.altitude_bias_m = j.value("altitude_bias_m", 0.0);
    n.attitude_sigma_deg = j.value("attitude_sigma_deg", 0.0);
    n.pixel_sigma_px = j.value("pixel_sigma_px", 0.0);
    n.hdop_scale = j.value("hdop_scale", 1.0);
    n.latency_s = j.value("latency_s", 0.0);
    n.seed = j.value("seed", std::uint64_t{0});
    n.validate();
    return n;
}

} // namespace tds::uncertainty
