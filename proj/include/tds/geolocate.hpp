#pragma once

#include "tds/geodesy.hpp"
#include "tds/optics.hpp"
#include "tds/terrain.hpp"

#include <functional>

namespace tds::geolocate {

using geodesy::GeodeticPosition;

/// Flat-tangent projection anchored at a ray origin: east/north scale from
/// the WGS84 curvature radii at the origin, up = altitude difference. Linear
/// in (lat, lon, alt), so a constant-elevation surface is exactly a plane and
/// grid-cell boundaries stay straight. Curvature error is below 2 m vertical
/// over 5 km, the default maximum ray range.
class LocalProjection {
public:
    explicit LocalProjection(const GeodeticPosition& origin);

    Vec3 to_local(double lat, double lon, double alt) const;
    GeodeticPosition from_local(const Vec3& v) const;
    const GeodeticPosition& origin() const { return origin_; }
    double meters_per_deg_lat() const { return m_lat_; }
    double meters_per_deg_lon() const { return m_lon_; }

private:
    GeodeticPosition origin_;
    double m_lat_, m_lon_;
};

enum class GeoStatus { HIT, MISS_OUT_OF_REGION, MISS_ABOVE_HORIZON, ORIGIN_BELOW_TERRAIN };

std::string status_name(GeoStatus s);

struct GeolocationResult {
    GeoStatus status = GeoStatus::MISS_OUT_OF_REGION;
    GeodeticPosition hit;  // valid when status == HIT
    int cell_row = -1, cell_col = -1;
    double ray_length_m = 0;
    int iterations = 0; // traversal steps examined
};

/// Vehicle pose snapshot used for geolocation.
struct VehicleState {
    GeodeticPosition position;
    optics::GimbalState attitude;
    double timestamp_s = 0;
};

struct CastOptions {
    double max_range_m = 5000.0;
    double intersection_tol_m = 1e-6;
};

/// Casts a ray from origin along dir_enu (unit, ENU at origin) into the
/// bilinear terrain surface: 2-D DDA over the patch rectangles the footprint
/// crosses, quadratic root inside each patch, first hit wins. Misses are
/// results, not errors. The grid datum must match the origin datum.
GeolocationResult cast_ray(const terrain::TerrainGrid& grid, const GeodeticPosition& origin,
                           const Vec3& dir_enu, const CastOptions& opts = {});

/// pixel -> camera ray -> world ray -> cast_ray.
GeolocationResult geolocate_pixel(const terrain::TerrainGrid& grid, const VehicleState& state,
                                  const optics::CameraModel& cam, double px_x, double px_y,
                                  const CastOptions& opts = {});

/// Geolocates the center pixel of a detection bounding box (x0, y0, x1, y1).
GeolocationResult geolocate_detection(const terrain::TerrainGrid& grid, const VehicleState& state,
                                      const optics::CameraModel& cam, double x0, double y0,
                                      double x1, double y1, const CastOptions& opts = {});

/// Walks the rectangles of a 1-D boundary partition product (the bilinear
/// patch grid) along the segment (x0,y0)->(x1,y1) in degree space, visiting
/// every rectangle the segment crosses in entry order. The visitor receives
/// (lat_interval, lon_interval, t_enter, t_exit) with t in [0, 1] along the
/// segment; returning true stops the walk. Exposed for traversal audits.
struct PatchGridSpec {
    double lat0, dlat;
    int rows; // lat intervals: index 0..rows (margins at 0 and rows)
    double lon0, dlon;
    int cols;
};

void walk_patches(const PatchGridSpec& spec, double lat_a, double lon_a, double lat_b,
                  double lon_b,
                  const std::function<bool(int, int, double, double)>& visit);

PatchGridSpec patch_grid_spec(const terrain::TerrainGrid& grid);

/// Boundary coordinates of a patch interval along one axis: index i covers
/// [lower(i), lower(i+1)] with half-cell margins at both region edges.
double patch_lower_lat(const PatchGridSpec& spec, int i);
double patch_lower_lon(const PatchGridSpec& spec, int j);

} // namespace tds::geolocate
