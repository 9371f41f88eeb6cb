#pragma once

#include "tds/geolocate.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tds::uncertainty {

/// Error sources injected around a nominal geolocation: GPS scatter (split
/// horizontal/vertical, horizontal scaled by HDOP), a deterministic altitude
/// bias, small-angle attitude scatter per gimbal axis, and pixel scatter on
/// the detection. latency_s shifts the state lookup time for trajectory-fed
/// runs; with a static state it is a no-op.
struct NoiseModel {
    double gps_sigma_h_m = 0;      // per horizontal axis
    double gps_sigma_v_m = 0;
    double altitude_bias_m = 0;    // systematic, applied every trial
    double attitude_sigma_deg = 0; // per gimbal axis
    double pixel_sigma_px = 0;
    double hdop_scale = 1.0;       // >= 1, multiplies gps_sigma_h_m
    double latency_s = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Named defaults. Values are approximate field magnitudes, not calibrated
/// constants: ground_hover / airborne_hover carry the GPS scatter seen while
/// hovering on the ground vs in the air; altitude_bias_high / _low carry
/// persistent altimeter offsets; field combines scatter and bias.
NoiseModel noise_preset(const std::string& name);
std::vector<std::string> noise_preset_names();

struct TrialRecord {
    int trial = 0;
    double d_haversine_m = 0;
    double d_elev_m = 0;
    geolocate::GeoStatus status = geolocate::GeoStatus::HIT;
};

struct ErrorStats {
    int n = 0;
    double mean_haversine_m = 0;
    double max_haversine_m = 0;
    double mean_abs_elevation_err_m = 0;
    double max_abs_elevation_err_m = 0;
    int miss_count = 0;
    std::vector<TrialRecord> records;
};

/// Per-trial CSV: trial,d_haversine_m,d_elev_m,status
std::string error_stats_csv(const ErrorStats& stats);

/// Applies one trial's perturbation. Deterministic in (noise.seed,
/// trial_index) via counter-based seed derivation; trials are independent of
/// one another and of execution order. Zero noise returns the state bit-exact.
geolocate::VehicleState perturb_state(const geolocate::VehicleState& state,
                                      const NoiseModel& noise, int trial_index);

/// Horizontal geolocation error caused by an altitude bias over flat terrain:
/// |bias| / tan(depression_angle). A drone believing itself lower than the
/// terrain model pulls the returned point toward the drone; believing itself
/// higher pushes it past the target. Requires 0 < depression < 90 deg.
double analytic_bias_error(double bias_m, double depression_angle_deg);

/// Nominal scene for Monte Carlo sweeps: pose + camera + target pixel, or a
/// detection bbox whose center pixel is used.
struct Scene {
    geolocate::VehicleState state;
    optics::CameraModel camera;
    double pixel_x = 0, pixel_y = 0;
    std::optional<std::array<double, 4>> bbox;
};

/// Runs `trials` perturbed geolocations against `truth`, recording haversine
/// and |altitude| errors for hits and counting misses. `seed` overrides
/// noise.seed. Deterministic: identical inputs give bit-identical stats.
ErrorStats monte_carlo_geolocation(const terrain::TerrainGrid& grid, const Scene& scene,
                                   const geodesy::GeodeticPosition& truth,
                                   const NoiseModel& noise, int trials, std::uint64_t seed);

/// Pixel perturbation for a trial (stream separate from perturb_state),
/// clamped into the frame. Exposed for the scenario runner.
std::pair<double, double> perturb_pixel(const optics::CameraModel& cam, double px_x, double px_y,
                                        const NoiseModel& noise, int trial_index);

NoiseModel noise_from_json_file(const std::string& path);

} // namespace tds::uncertainty
