#pragma once

#include "tds/math.hpp"

#include <string>

namespace tds::geodesy {

/// Reference surface for altitudes. Ellipsoidal and mean-sea-level heights
/// differ by the local geoid undulation; arithmetic across datums is rejected.
enum class Datum { ELLIPSOID_WGS84, AMSL };

std::string datum_name(Datum d);
Datum datum_from_name(const std::string& name);

// WGS84 ellipsoid.
inline constexpr double kWgs84A = 6378137.0;              // semi-major axis [m]
inline constexpr double kWgs84F = 1.0 / 298.257223563;    // flattening
inline constexpr double kWgs84B = kWgs84A * (1.0 - kWgs84F);
inline constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F); // eccentricity^2

/// Mean Earth radius used by the haversine distance [m].
inline constexpr double kMeanEarthRadius = 6371008.8;

/// Latitude/longitude in degrees plus altitude in meters against an explicit
/// datum. Longitude is normalized to [-180, 180] on construction; latitude
/// outside [-90, 90] is rejected.
struct GeodeticPosition {
    double latitude_deg = 0;
    double longitude_deg = 0;
    double altitude_m = 0;
    Datum datum = Datum::ELLIPSOID_WGS84;

    GeodeticPosition() = default;
    GeodeticPosition(double lat_deg, double lon_deg, double alt_m,
                     Datum datum_tag = Datum::ELLIPSOID_WGS84);
};

/// Earth-centered Earth-fixed Cartesian position [m].
struct EcefVector {
    double x = 0, y = 0, z = 0;
};

/// Local tangent frame: origin plus the rotation taking ECEF deltas to local
/// East-North-Up components. The Up axis is the ellipsoid normal at origin.
struct TangentFrame {
    GeodeticPosition origin;
    Mat3 ecef_to_enu; // rows are the E, N, U axes in ECEF coordinates
    EcefVector origin_ecef;
};

/// Exact closed-form WGS84 conversion. Requires ellipsoidal altitude.
EcefVector lla_to_ecef(const GeodeticPosition& p);

/// Iterative inverse of lla_to_ecef; result carries the ellipsoid datum.
/// Rejects near-singular inputs (|v| <= 1e6 m).
GeodeticPosition ecef_to_lla(const EcefVector& v);

/// Tangent frame centered at p. AMSL origins are accepted and treated as
/// locally ellipsoidal (frame geometry depends only on lat/lon; altitude
/// offsets stay within the origin's datum).
TangentFrame frame_at(const GeodeticPosition& p);

/// ENU components of p relative to the frame origin [m]. p must share the
/// origin's datum.
Vec3 to_enu(const TangentFrame& frame, const GeodeticPosition& p);

/// Inverse of to_enu; the result carries the frame origin's datum.
GeodeticPosition from_enu(const TangentFrame& frame, const Vec3& enu);

/// Great-circle distance on a sphere of mean radius 6371008.8 m. Altitude
/// and datum are ignored.
double haversine_m(const GeodeticPosition& a, const GeodeticPosition& b);

/// Re-tag an altitude across datums using a single geoid undulation constant
/// for the site: ellipsoid_height = amsl_height + undulation.
GeodeticPosition datum_convert(const GeodeticPosition& p, double geoid_undulation_m,
                               Datum target);

/// Meridional radius of curvature at geodetic latitude [m].
double meridional_radius(double latitude_deg);

/// Prime-vertical radius of curvature at geodetic latitude [m].
double prime_vertical_radius(double latitude_deg);

} // namespace tds::geodesy
