#include "tds/geodesy.hpp"

#include "tds/error.hpp"

#include <algorithm>
#include <cmath>

namespace tds::geodesy {

std::string datum_name(Datum d) {
    return d == Datum::ELLIPSOID_WGS84 ? "ELLIPSOID_WGS84" : "AMSL";
}

Datum datum_from_name(const std::string& name) {
    if (name == "ELLIPSOID_WGS84") return Datum::ELLIPSOID_WGS84;
    if (name == "AMSL") return Datum::AMSL;
    throw ValidationError("unknown datum name: " + name);
}

GeodeticPosition::GeodeticPosition(double lat_deg, double lon_deg, double alt_m,
                                   Datum datum_tag)
    : latitude_deg(lat_deg), longitude_deg(lon_deg), altitude_m(alt_m), datum(datum_tag) {
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg) || !std::isfinite(alt_m))
        throw ValidationError("non-finite geodetic component");
    if (lat_deg < -90.0 || lat_deg > 90.0)
        throw ValidationError("latitude out of [-90, 90]: " + std::to_string(lat_deg));
    if (lon_deg < -180.0 || lon_deg > 180.0) {
        longitude_deg = wrap_deg180(lon_deg);
        if (longitude_deg == -180.0 && lon_deg > 0) longitude_deg = 180.0;
    }
}

EcefVector lla_to_ecef(const GeodeticPosition& p) {
    if (p.datum != Datum::ELLIPSOID_WGS84)
        throw DatumError("lla_to_ecef requires ellipsoidal altitude; convert AMSL first");
    double lat = deg2rad(p.latitude_deg);
    double lon = deg2rad(p.longitude_deg);
    double sl = std::sin(lat), cl = std::cos(lat);
    double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
    double h = p.altitude_m;
    return {(n + h) * cl * std::cos(lon), (n + h) * cl * std::sin(lon),
            (n * (1.0 - kWgs84E2) + h) * sl};
}

GeodeticPosition ecef_to_lla(const EcefVector& v) {
    double r = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (!(r > 1e6))
        throw ValidationError("ecef_to_lla: point too close to Earth center");
    double lon = std::atan2(v.y, v.x);
    double p = std::hypot(v.x, v.y);
    double lat = std::atan2(v.z, p * (1.0 - kWgs84E2));
    // Fixed-point iteration on the geodetic latitude; converges to double
    // precision in a handful of steps for near-surface points.
    for (int i = 0; i < 10; ++i) {
        double sl = std::sin(lat);
        double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
        double next = std::atan2(v.z + kWgs84E2 * n * sl, p);
        if (std::abs(next - lat) < 1e-15) {
            lat = next;
            break;
        }
        lat = next;
    }
    double sl = std::sin(lat), cl = std::cos(lat);
    double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
    double h;
    if (std::abs(cl) > 1e-8)
        h = p / cl - n;
    else
        h = std::abs(v.z) / std::abs(sl) - n * (1.0 - kWgs84E2);
    return {rad2deg(lat), rad2deg(lon), h, Datum::ELLIPSOID_WGS84};
}

TangentFrame frame_at(const GeodeticPosition& p) {
    double lat = deg2rad(p.latitude_deg);
    double lon = deg2rad(p.longitude_deg);
    double sl = std::sin(lat), cl = std::cos(lat);
    double so = std::sin(lon), co = std::cos(lon);
    TangentFrame f;
    f.origin = p;
    f.ecef_to_enu.m[0][0] = -so;
    f.ecef_to_enu.m[0][1] = co;
    f.ecef_to_enu.m[0][2] = 0;
    f.ecef_to_enu.m[1][0] = -sl * co;
    f.ecef_to_enu.m[1][1] = -sl * so;
    f.ecef_to_enu.m[1][2] = cl;
    f.ecef_to_enu.m[2][0] = cl * co;
    f.ecef_to_enu.m[2][1] = cl * so;
    f.ecef_to_enu.m[2][2] = sl;
    GeodeticPosition o = p;
    o.datum = Datum::ELLIPSOID_WGS84; // AMSL heights treated as locally ellipsoidal
    f.origin_ecef = lla_to_ecef(o);
    return f;
}

Vec3 to_enu(const TangentFrame& frame, const GeodeticPosition& p) {
    if (p.datum != frame.origin.datum)
        throw DatumError("to_enu: datum mismatch between frame origin and point");
    GeodeticPosition q = p;
    q.datum = Datum::ELLIPSOID_WGS84;
    EcefVector e = lla_to_ecef(q);
    Vec3 d{e.x - frame.origin_ecef.x, e.y - frame.origin_ecef.y, e.z - frame.origin_ecef.z};
    return frame.ecef_to_enu * d;
}

GeodeticPosition from_enu(const TangentFrame& frame, const Vec3& enu) {
    Vec3 d = frame.ecef_to_enu.transposed() * enu;
    EcefVector e{frame.origin_ecef.x + d.x, frame.origin_ecef.y + d.y,
                 frame.origin_ecef.z + d.z};
    GeodeticPosition p = ecef_to_lla(e);
    p.datum = frame.origin.datum;
    return p;
}

double haversine_m(const GeodeticPosition& a, const GeodeticPosition& b) {
    double lat1 = deg2rad(a.latitude_deg), lat2 = deg2rad(b.latitude_deg);
    double dlat = lat2 - lat1;
    double dlon = deg2rad(b.longitude_deg - a.longitude_deg);
    double sl = std::sin(dlat * 0.5), so = std::sin(dlon * 0.5);
    double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kMeanEarthRadius * std::asin(std::sqrt(h));
}

GeodeticPosition datum_convert(const GeodeticPosition& p, double geoid_undulation_m,
                               Datum target) {
    if (!std::isfinite(geoid_undulation_m))
        throw ValidationError("datum_convert: non-finite undulation");
    if (p.datum == target) return p;
    GeodeticPosition out = p;
    out.datum = target;
    if (target == Datum::ELLIPSOID_WGS84)
        out.altitude_m = p.altitude_m + geoid_undulation_m;
    else
        out.altitude_m = p.altitude_m - geoid_undulation_m;
    return out;
}

double meridional_radius(double latitude_deg) {
    double sl = std::sin(deg2rad(latitude_deg));
    double d = 1.0 - kWgs84E2 * sl * sl;
    return kWgs84A * (1.0 - kWgs84E2) / (d * std::sqrt(d));
}

double prime_vertical_radius(double latitude_deg) {
    double sl = std::sin(deg2rad(latitude_deg));
    return kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
}

} // namespace tds::geodesy
