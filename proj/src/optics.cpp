#include "tds/optics.hpp"

#include "tds/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tds::optics {

using geodesy::GeodeticPosition;

CameraModel::CameraModel(double fov_h, int width, int height)
    : fov_h_deg(fov_h), width_px(width), height_px(height) {
    if (!(fov_h > 0) || !(fov_h < 180))
        throw ValidationError("fov_h_deg must be in (0, 180)");
    if (width <= 0 || height <= 0)
        throw ValidationError("image resolution must be positive");
}

double CameraModel::focal_px() const {
    return (width_px / 2.0) / std::tan(deg2rad(fov_h_deg) / 2.0);
}

double CameraModel::fov_v_deg() const {
    return rad2deg(2.0 * std::atan((height_px / 2.0) / focal_px()));
}

GimbalState GimbalState::from_quaternion(const Quaternion& q) {
    if (std::abs(q.norm() - 1.0) > 1e-6)
        throw ValidationError("gimbal quaternion is not unit norm");
    GimbalState g;
    g.orientation_q = q.normalized();
    g.source = Source::QUATERNION;
    return g;
}

GimbalState GimbalState::from_euler(double vehicle_yaw_deg, double gimbal_pitch_deg,
                                    double gimbal_roll_deg) {
    // Identity points the optical axis East; yaw is compass, so the world-Z
    // rotation is (90 deg - yaw). Pitch below horizon = negative, and the
    // body +Y (left) rotation that tilts the axis down is positive, hence
    // the sign flip. Intrinsic z-y'-x'' composition.
    double az = deg2rad(90.0 - vehicle_yaw_deg);
    Quaternion qz = Quaternion::from_axis_angle({0, 0, 1}, az);
    Quaternion qy = Quaternion::from_axis_angle({0, 1, 0}, -deg2rad(gimbal_pitch_deg));
    Quaternion qx = Quaternion::from_axis_angle({1, 0, 0}, deg2rad(gimbal_roll_deg));
    GimbalState g;
    g.orientation_q = (qz * qy * qx).normalized();
    g.source = Source::EULER;
    return g;
}

EulerAngles quaternion_to_euler(const Quaternion& q) {
    Mat3 r = q.to_matrix();
    EulerAngles e;
    double sb = -r.m[2][0];
    sb = std::clamp(sb, -1.0, 1.0);
    double beta = std::asin(sb); // = -pitch
    e.gimbal_pitch_deg = -rad2deg(beta);
    if (std::abs(sb) > 1.0 - 1e-12) {
        // gimbal lock: fold roll into yaw
        e.gimbal_roll_deg = 0;
        e.vehicle_yaw_deg = wrap_deg360(90.0 - rad2deg(std::atan2(-r.m[0][1], r.m[1][1])));
    } else {
        e.vehicle_yaw_deg = wrap_deg360(90.0 - rad2deg(std::atan2(r.m[1][0], r.m[0][0])));
        e.gimbal_roll_deg = rad2deg(std::atan2(r.m[2][1], r.m[2][2]));
    }
    return e;
}

Vec3 pixel_to_camera_ray(const CameraModel& cam, double px_x, double px_y) {
    if (!(px_x >= 0) || !(px_x < cam.width_px) || !(px_y >= 0) || !(px_y < cam.height_px))
        throw ValidationError("pixel outside frame");
    double f = cam.focal_px();
    Vec3 d{(px_x - cam.width_px / 2.0) / f, (px_y - cam.height_px / 2.0) / f, 1.0};
    return d.normalized();
}

namespace {

// Calibrated mapping from image axes (right, down, forward) to the camera
// body frame: front-left-up. forward -> +X, right -> -Y, down -> -Z.
const Mat3 kImageToBody = [] {
    Mat3 m;
    m.m[0][0] = 0;  m.m[0][1] = 0;  m.m[0][2] = 1;
    m.m[1][0] = -1; m.m[1][1] = 0;  m.m[1][2] = 0;
    m.m[2][0] = 0;  m.m[2][1] = -1; m.m[2][2] = 0;
    return m;
}();

} // namespace

Vec3 camera_ray_to_world(const Vec3& ray_cam, const GimbalState& gimbal) {
    if (std::abs(gimbal.orientation_q.norm() - 1.0) > 1e-6)
        throw ValidationError("gimbal quaternion is not unit norm");
    return gimbal.orientation_q.rotate(kImageToBody * ray_cam);
}

StareCommand stare_solution(const GeodeticPosition& drone, const GeodeticPosition& target,
                            const GimbalLimits& limits) {
    if (drone.datum != target.datum)
        throw DatumError("stare_solution: drone/target datum mismatch");
    Vec3 d = geodesy::to_enu(geodesy::frame_at(drone), target);
    double horiz = std::hypot(d.x, d.y);
    double dist = d.norm();
    if (dist < 1e-9)
        throw ValidationError("stare_solution: zero displacement");

    StareCommand cmd;
    cmd.vehicle_yaw_deg = horiz < 1e-12 ? 0.0 : wrap_deg360(rad2deg(std::atan2(d.x, d.y)));
    cmd.gimbal_pitch_deg = rad2deg(std::atan2(d.z, horiz));
    cmd.gimbal_roll_deg = 0.0;
    cmd.reachable = cmd.gimbal_pitch_deg >= limits.pitch_min_deg &&
                    cmd.gimbal_pitch_deg <= limits.pitch_max_deg;
    return cmd;
}

// ---------------------------------------------------------------------------
// Frame-convention calibration

std::string FrameConvention::describe() const {
    auto axis = [&](int row) {
        const char* names[3] = {"image_right", "image_down", "image_forward"};
        for (int c = 0; c < 3; ++c) {
            if (camera_to_body.m[row][c] > 0.5) return std::string("+") + names[c];
            if (camera_to_body.m[row][c] < -0.5) return std::string("-") + names[c];
        }
        return std::string("?");
    };
    std::string s = "quat ";
    s += wxyz_order ? "(w,x,y,z)" : "(x,y,z,w)";
    s += conjugate ? ", conjugated" : "";
    s += ned_world ? ", world NED" : ", world ENU";
    s += ", body X=" + axis(0) + " Y=" + axis(1) + " Z=" + axis(2);
    return s;
}

AnchorScene anchor_scene() {
    AnchorScene s{
        GeodeticPosition(36.212189, -96.006905, 195.0, geodesy::Datum::ELLIPSOID_WGS84),
        CameraModel(74.0, 1920, 1080),
        960.0,
        810.0,
        {0.056115267, -0.0154703723, 0.9608545, 0.27086953},
        GeodeticPosition(36.21290054231726, -96.0083389306795, 180.99648120246397,
                         geodesy::Datum::ELLIPSOID_WGS84),
        180.9964812024639,
    };
    return s;
}

FrameConvention active_frame_convention() {
    FrameConvention fc;
    fc.wxyz_order = false;
    fc.conjugate = false;
    fc.ned_world = false;
    fc.camera_to_body = kImageToBody;
    return fc;
}

CalibrationOutcome calibrate_frame_convention(double gate_m) {
    const AnchorScene scene = anchor_scene();
    geodesy::TangentFrame frame = geodesy::frame_at(scene.drone);
    Vec3 truth_enu = geodesy::to_enu(frame, scene.expected_hit);
    Vec3 ray_img = pixel_to_camera_ray(scene.camera, scene.pixel_x, scene.pixel_y);
    double ground_u = scene.ground_elevation_m - scene.drone.altitude_m;

    // All 24 proper signed permutations of the image axes.
    std::vector<Mat3> mappings;
    int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& perm : perms) {
        for (int sx = -1; sx <= 1; sx += 2)
            for (int sy = -1; sy <= 1; sy += 2)
                for (int sz = -1; sz <= 1; sz += 2) {
                    Mat3 m;
                    int sign[3] = {sx, sy, sz};
                    for (int i = 0; i < 3; ++i) m.m[perm[i]][i] = sign[i];
                    double det =
                        m.m[0][0] * (m.m[1][1] * m.m[2][2] - m.m[1][2] * m.m[2][1]) -
                        m.m[0][1] * (m.m[1][0] * m.m[2][2] - m.m[1][2] * m.m[2][0]) +
                        m.m[0][2] * (m.m[1][0] * m.m[2][1] - m.m[1][1] * m.m[2][0]);
                    if (det > 0.5) mappings.push_back(m);
                }
    }

    CalibrationOutcome out;
    out.best_residual_m = std::numeric_limits<double>::infinity();
    for (bool wxyz : {false, true}) {
        Quaternion q;
        if (wxyz) {
            q = {scene.quat_raw[1], scene.quat_raw[2], scene.quat_raw[3], scene.quat_raw[0]};
        } else {
            q = {scene.quat_raw[0], scene.quat_raw[1], scene.quat_raw[2], scene.quat_raw[3]};
        }
        q = q.normalized();
        for (bool conj : {false, true}) {
            Quaternion qr = conj ? q.conjugate() : q;
            for (bool ned : {false, true}) {
                for (const Mat3& m : mappings) {
                    Vec3 d = qr.rotate(m * ray_img);
                    if (ned) d = Vec3{d.y, d.x, -d.z};
                    if (d.z >= -1e-9) continue; // never reaches the ground plane
                    Vec3 hit = d * (ground_u / d.z);
                    double dx = hit.x - truth_enu.x, dy = hit.y - truth_enu.y;
                    double residual = std::hypot(dx, dy);
                    if (residual < out.best_residual_m) {
                        out.best_residual_m = residual;
                        out.selected = {wxyz, conj, ned, m};
                    }
                    if (residual < gate_m)
                        out.matches.push_back({{wxyz, conj, ned, m}, residual});
                }
            }
        }
    }
    out.unique = out.matches.size() == 1;
    return out;
}

} // namespace tds::optics
