#pragma once

#include "tds/geodesy.hpp"
#include "tds/math.hpp"

#include <string>
#include <vector>

namespace tds::optics {

/// Pinhole camera from horizontal FOV and resolution. Square pixels; the
/// vertical FOV follows from the aspect ratio. No lens distortion.
struct CameraModel {
    double fov_h_deg = 74.0;
    int width_px = 1920;
    int height_px = 1080;

    CameraModel() = default;
    CameraModel(double fov_h, int width, int height);

    double focal_px() const;
    double fov_v_deg() const;
};

/// Orientation of the stabilized camera: unit quaternion rotating camera-body
/// vectors into the world ENU frame.
///
/// Frame convention (locked by the calibration harness, see
/// calibrate_frame_convention): quaternion components are (x, y, z, w); the
/// camera body frame is front-left-up with +X along the optical axis,
/// +Y = -image_right, +Z = -image_down; the identity quaternion points the
/// optical axis due East with the image upright.
struct GimbalState {
    Quaternion orientation_q;

    enum class Source { QUATERNION, EULER };
    Source source = Source::QUATERNION;

    static GimbalState from_quaternion(const Quaternion& q);
    /// Compass yaw (deg clockwise from North), gimbal pitch (deg, negative
    /// below horizon), gimbal roll (deg, right-hand about the optical axis).
    static GimbalState from_euler(double vehicle_yaw_deg, double gimbal_pitch_deg,
                                  double gimbal_roll_deg);
};

/// Recovered Euler angles under the same convention as GimbalState::from_euler.
struct EulerAngles {
    double vehicle_yaw_deg = 0;
    double gimbal_pitch_deg = 0;
    double gimbal_roll_deg = 0;
};

EulerAngles quaternion_to_euler(const Quaternion& q);

/// Two-axis gimbal limits; vehicle yaw is unlimited.
struct GimbalLimits {
    double pitch_min_deg = -120.0;
    double pitch_max_deg = 30.0;
    double roll_min_deg = -45.0;
    double roll_max_deg = 45.0;
};

/// Pointing command for a vehicle-yaw + two-axis-gimbal platform.
struct StareCommand {
    double vehicle_yaw_deg = 0;  // [0, 360) clockwise from North
    double gimbal_pitch_deg = 0; // negative = below horizon
    double gimbal_roll_deg = 0;
    bool reachable = true;
};

/// Unit ray through pixel (x, y) in the camera frame: +X right, +Y down,
/// +Z along the optical axis; direction ~ ((x - W/2)/f, (y - H/2)/f, 1).
/// Pixels outside [0, W) x [0, H) are rejected.
Vec3 pixel_to_camera_ray(const CameraModel& cam, double px_x, double px_y);

/// Rotates a camera-frame ray into the world ENU frame under the calibrated
/// convention. Rejects quaternions off unit norm by more than 1e-6.
Vec3 camera_ray_to_world(const Vec3& ray_cam, const GimbalState& gimbal);

/// Yaw/pitch solution that points the camera center at `target` from `drone`:
/// yaw = atan2(east, north), pitch = atan2(up, horizontal range), roll = 0.
/// reachable reflects the pitch limits. Zero displacement is rejected.
StareCommand stare_solution(const geodesy::GeodeticPosition& drone,
                            const geodesy::GeodeticPosition& target,
                            const GimbalLimits& limits = {});

// ---------------------------------------------------------------------------
// Frame-convention calibration
//
// The anchor scene (a reference geolocation with a known camera, quaternion,
// and ground truth) does not state the quaternion component order, rotation
// sense, world frame, or camera axis convention. The calibration enumerates
// all of them and demands a unique convention that reproduces the anchor
// within 0.5 m horizontally.

struct FrameConvention {
    bool wxyz_order = false;   // components given as (w,x,y,z) instead of (x,y,z,w)
    bool conjugate = false;    // rotation sense: use the conjugate quaternion
    bool ned_world = false;    // quaternion targets NED rather than ENU
    Mat3 camera_to_body;       // image (right, down, forward) axes -> body axes
    std::string describe() const;
};

struct CalibrationOutcome {
    std::vector<std::pair<FrameConvention, double>> matches; // residual < gate
    double best_residual_m = 0;
    FrameConvention selected;
    bool unique = false;
};

/// Runs the enumeration (2 component orders x 2 senses x 2 world frames x 24
/// proper camera-axis mappings) against the built-in anchor scene.
CalibrationOutcome calibrate_frame_convention(double gate_m = 0.5);

/// The convention the library is compiled to use (the calibration winner).
FrameConvention active_frame_convention();

/// The anchor scene inputs, shared with tests and the CLI.
struct AnchorScene {
    geodesy::GeodeticPosition drone;
    CameraModel camera;
    double pixel_x, pixel_y;
    double quat_raw[4]; // as published: (0.056115267, -0.0154703723, 0.9608545, 0.27086953)
    geodesy::GeodeticPosition expected_hit;
    double ground_elevation_m;
};

AnchorScene anchor_scene();

} // namespace tds::optics
