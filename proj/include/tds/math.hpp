#pragma once

#include <cmath>

namespace tds {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle in degrees to [-180, 180).
inline double wrap_deg180(double deg) {
    double w = std::fmod(deg + 180.0, 360.0);
    if (w < 0) w += 360.0;
    return w - 180.0;
}

/// Wrap an angle in degrees to [0, 360).
inline double wrap_deg360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0) w += 360.0;
    return w;
}

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// 3x3 matrix, row-major.
struct Mat3 {
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[j][i];
        return r;
    }

    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
};

/// Unit quaternion. Component order is (x, y, z, w): vector part first,
/// scalar last. rotate() maps body-frame vectors into the parent frame.
struct Quaternion {
    double x = 0, y = 0, z = 0, w = 1;

    static Quaternion identity() { return {0, 0, 0, 1}; }

    /// Rotation of `angle_rad` about unit `axis`.
    static Quaternion from_axis_angle(const Vec3& axis, double angle_rad) {
        double h = angle_rad * 0.5;
        double s = std::sin(h);
        Vec3 a = axis.normalized();
        return {a.x * s, a.y * s, a.z * s, std::cos(h)};
    }

    double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }

    Quaternion normalized() const {
        double n = norm();
        return {x / n, y / n, z / n, w / n};
    }

    Quaternion conjugate() const { return {-x, -y, -z, w}; }

    Quaternion operator*(const Quaternion& q) const {
        return {w * q.x + x * q.w + y * q.z - z * q.y,
                w * q.y - x * q.z + y * q.w + z * q.x,
                w * q.z + x * q.y - y * q.x + z * q.w,
                w * q.w - x * q.x - y * q.y - z * q.z};
    }

    Vec3 rotate(const Vec3& v) const {
        // v' = v + 2w(q x v) + 2(q x (q x v))
        Vec3 qv{x, y, z};
        Vec3 t = qv.cross(v) * 2.0;
        return v + t * w + qv.cross(t);
    }

    Mat3 to_matrix() const {
        Mat3 r;
        double xx = x * x, yy = y * y, zz = z * z;
        double xy = x * y, xz = x * z, yz = y * z;
        double wx = w * x, wy = w * y, wz = w * z;
        r.m[0][0] = 1 - 2 * (yy + zz);
        r.m[0][1] = 2 * (xy - wz);
        r.m[0][2] = 2 * (xz + wy);
        r.m[1][0] = 2 * (xy + wz);
        r.m[1][1] = 1 - 2 * (xx + zz);
        r.m[1][2] = 2 * (yz - wx);
        r.m[2][0] = 2 * (xz - wy);
        r.m[2][1] = 2 * (yz + wx);
        r.m[2][2] = 1 - 2 * (xx + yy);
        return r;
    }
};

} // namespace tds
