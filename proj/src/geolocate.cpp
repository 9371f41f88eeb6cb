#include "tds/geolocate.hpp"

#include "tds/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tds::geolocate {

LocalProjection::LocalProjection(const GeodeticPosition& origin) : origin_(origin) {
    double m = geodesy::meridional_radius(origin.latitude_deg) + origin.altitude_m;
    double n = geodesy::prime_vertical_radius(origin.latitude_deg) + origin.altitude_m;
    m_lat_ = m * kPi / 180.0;
    m_lon_ = n * std::cos(deg2rad(origin.latitude_deg)) * kPi / 180.0;
}

Vec3 LocalProjection::to_local(double lat, double lon, double alt) const {
    return {(lon - origin_.longitude_deg) * m_lon_, (lat - origin_.latitude_deg) * m_lat_,
            alt - origin_.altitude_m};
}

GeodeticPosition LocalProjection::from_local(const Vec3& v) const {
    return {origin_.latitude_deg + v.y / m_lat_, origin_.longitude_deg + v.x / m_lon_,
            origin_.altitude_m + v.z, origin_.datum};
}

std::string status_name(GeoStatus s) {
    switch (s) {
        case GeoStatus::HIT: return "HIT";
        case GeoStatus::MISS_OUT_OF_REGION: return "MISS_OUT_OF_REGION";
        case GeoStatus::MISS_ABOVE_HORIZON: return "MISS_ABOVE_HORIZON";
        case GeoStatus::ORIGIN_BELOW_TERRAIN: return "ORIGIN_BELOW_TERRAIN";
    }
    return "MISS_OUT_OF_REGION";
}

PatchGridSpec patch_grid_spec(const terrain::TerrainGrid& grid) {
    return {grid.lat0(), grid.dlat(), grid.rows(), grid.lon0(), grid.dlon(), grid.cols()};
}

double patch_lower_lat(const PatchGridSpec& s, int i) {
    if (i <= 0) return s.lat0;
    if (i >= s.rows + 1) return s.lat0 + s.rows * s.dlat;
    return s.lat0 + (i - 0.5) * s.dlat;
}

double patch_lower_lon(const PatchGridSpec& s, int j) {
    if (j <= 0) return s.lon0;
    if (j >= s.cols + 1) return s.lon0 + s.cols * s.dlon;
    return s.lon0 + (j - 0.5) * s.dlon;
}

namespace {

int interval_index(double x, double x0, double dx, int count) {
    int i = static_cast<int>(std::floor((x - x0) / dx + 0.5));
    return std::clamp(i, 0, count);
}

// Clips t-range of the segment a + t*(b-a) against [lo, hi] on one axis.
bool clip_axis(double a, double b, double lo, double hi, double& t0, double& t1) {
    double d = b - a;
    if (std::abs(d) < 1e-300) return a >= lo && a <= hi;
    double ta = (lo - a) / d, tb = (hi - a) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 <= t1;
}

} // namespace

void walk_patches(const PatchGridSpec& spec, double lat_a, double lon_a, double lat_b,
                  double lon_b, const std::function<bool(int, int, double, double)>& visit) {
    double lat_hi = spec.lat0 + spec.rows * spec.dlat;
    double lon_hi = spec.lon0 + spec.cols * spec.dlon;

    double t0 = 0.0, t1 = 1.0;
    if (!clip_axis(lat_a, lat_b, spec.lat0, lat_hi, t0, t1)) return;
    if (!clip_axis(lon_a, lon_b, spec.lon0, lon_hi, t0, t1)) return;

    double dlat_seg = lat_b - lat_a;
    double dlon_seg = lon_b - lon_a;
    double lat_e = lat_a + t0 * dlat_seg;
    double lon_e = lon_a + t0 * dlon_seg;
    int i = interval_index(lat_e, spec.lat0, spec.dlat, spec.rows);
    int j = interval_index(lon_e, spec.lon0, spec.dlon, spec.cols);

    double t = t0;
    // Upper bound on steps: full crossing of both axes plus margins.
    int max_steps = 2 * (spec.rows + spec.cols) + 8;
    for (int step = 0; step < max_steps; ++step) {
        // t at which the segment leaves interval i along lat, j along lon
        double t_lat = std::numeric_limits<double>::infinity();
        if (dlat_seg > 0) {
            double bound = patch_lower_lat(spec, i + 1);
            t_lat = (bound - lat_a) / dlat_seg;
        } else if (dlat_seg < 0) {
            double bound = patch_lower_lat(spec, i);
            t_lat = (bound - lat_a) / dlat_seg;
        }
        double t_lon = std::numeric_limits<double>::infinity();
        if (dlon_seg > 0) {
            double bound = patch_lower_lon(spec, j + 1);
            t_lon = (bound - lon_a) / dlon_seg;
        } else if (dlon_seg < 0) {
            double bound = patch_lower_lon(spec, j);
            t_lon = (bound - lon_a) / dlon_seg;
        }
        double t_exit = std::min({t_lat, t_lon, t1});
        t_exit = std::max(t_exit, t); // guard against fp regression

        if (visit(i, j, t, t_exit)) return;
        if (t_exit >= t1) return;

        if (t_lat <= t_exit + 0.0) i += dlat_seg > 0 ? 1 : -1;
        if (t_lon <= t_exit + 0.0) j += dlon_seg > 0 ? 1 : -1;
        if (i < 0 || i > spec.rows || j < 0 || j > spec.cols) return;
        t = t_exit;
    }
}

namespace {

struct AxisNodes {
    int n0, n1;     // clamped centroid indices
    double alpha;   // weight at segment start (t = 0 of the full ray param)
    double beta;    // weight slope per ray meter; 0 in margins
};

AxisNodes axis_nodes(int interval, int count, double origin_coord, double grid0, double step,
                     double coord_per_m) {
    AxisNodes a{};
    if (count == 1) {
        a.n0 = a.n1 = 0;
        a.alpha = 0;
        a.beta = 0;
    } else if (interval == 0) {
        a.n0 = 0;
        a.n1 = 1;
        a.alpha = 0;
        a.beta = 0;
    } else if (interval == count) {
        a.n0 = count - 2;
        a.n1 = count - 1;
        a.alpha = 1;
        a.beta = 0;
    } else {
        a.n0 = interval - 1;
        a.n1 = interval;
        // weight u(s) = (coord(s) - centroid(n0)) / step, affine in s
        double centroid0 = grid0 + (a.n0 + 0.5) * step;
        a.alpha = (origin_coord - centroid0) / step;
        a.beta = coord_per_m / step;
    }
    return a;
}

// Smallest real root of a*s^2 + b*s + c in [lo, hi]; NaN when none.
double smallest_root_in(double a, double b, double c, double lo, double hi) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double span = std::max(std::abs(lo), std::abs(hi)) + 1.0;
    if (std::abs(a) * span * span < 1e-12 * (std::abs(b) * span + std::abs(c) + 1e-300)) {
        // effectively linear
        if (std::abs(b) < 1e-300) return std::abs(c) < 1e-12 ? lo : nan;
        double s = -c / b;
        return (s >= lo && s <= hi) ? s : nan;
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0) return nan;
    double sq = std::sqrt(disc);
    double q = -0.5 * (b + (b >= 0 ? sq : -sq));
    double r1 = q / a;
    double r2 = (std::abs(q) > 1e-300) ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 >= lo && r1 <= hi) return r1;
    if (r2 >= lo && r2 <= hi) return r2;
    return nan;
}

} // namespace

GeolocationResult cast_ray(const terrain::TerrainGrid& grid, const GeodeticPosition& origin,
                           const Vec3& dir_enu, const CastOptions& opts) {
    if (origin.datum != grid.datum())
        throw DatumError("cast_ray: origin datum does not match grid datum");
    if (std::abs(dir_enu.norm() - 1.0) > 1e-6)
        throw ValidationError("cast_ray: direction must be a unit vector");

    LocalProjection proj(origin);
    const double smax = opts.max_range_m;
    const double tol = opts.intersection_tol_m;

    GeolocationResult result;
    result.status = dir_enu.z > 0 ? GeoStatus::MISS_ABOVE_HORIZON : GeoStatus::MISS_OUT_OF_REGION;

    // Degree-space footprint of the ray over s in [0, smax].
    const double lat_per_m = 1.0 / proj.meters_per_deg_lat();
    const double lon_per_m = 1.0 / proj.meters_per_deg_lon();
    const double lat_a = origin.latitude_deg;
    const double lon_a = origin.longitude_deg;
    const double lat_b = lat_a + dir_enu.y * smax * lat_per_m;
    const double lon_b = lon_a + dir_enu.x * smax * lon_per_m;

    if (grid.in_region(lat_a, lon_a)) {
        double surface = grid.elevation_at(lat_a, lon_a, terrain::ElevationMode::BILINEAR);
        if (origin.altitude_m < surface - 1e-9) {
            result.status = GeoStatus::ORIGIN_BELOW_TERRAIN;
            return result;
        }
    }

    PatchGridSpec spec = patch_grid_spec(grid);
    walk_patches(spec, lat_a, lon_a, lat_b, lon_b, [&](int i, int j, double t_in, double t_out) {
        ++result.iterations;
        AxisNodes au = axis_nodes(i, grid.rows(), lat_a, grid.lat0(), grid.dlat(),
                                  dir_enu.y * lat_per_m);
        AxisNodes av = axis_nodes(j, grid.cols(), lon_a, grid.lon0(), grid.dlon(),
                                  dir_enu.x * lon_per_m);
        double e00 = grid.elevation(au.n0, av.n0);
        double e10 = grid.elevation(au.n1, av.n0);
        double e01 = grid.elevation(au.n0, av.n1);
        double e11 = grid.elevation(au.n1, av.n1);
        // z(u, v) = A + B u + C v + D u v; u, v affine in ray length s
        double A = e00, B = e10 - e00, C = e01 - e00, D = e11 - e10 - e01 + e00;
        double qa = D * au.beta * av.beta;
        double qb = B * au.beta + C * av.beta + D * (au.alpha * av.beta + av.alpha * au.beta) -
                    dir_enu.z;
        double qc = A + B * au.alpha + C * av.alpha + D * au.alpha * av.alpha -
                    origin.altitude_m;

        double s_in = t_in * smax, s_out = t_out * smax;
        double s_hit = smallest_root_in(qa, qb, qc, std::max(s_in - tol, 0.0), s_out + tol);
        if (std::isnan(s_hit)) return false;

        s_hit = std::max(s_hit, 0.0);
        double lat = lat_a + dir_enu.y * s_hit * lat_per_m;
        double lon = lon_a + dir_enu.x * s_hit * lon_per_m;
        double alt = origin.altitude_m + dir_enu.z * s_hit;
        result.status = GeoStatus::HIT;
        result.hit = GeodeticPosition(lat, lon, alt, grid.datum());
        result.ray_length_m = s_hit;
        result.cell_row = std::clamp(static_cast<int>(std::floor((lat - grid.lat0()) / grid.dlat())),
                                     0, grid.rows() - 1);
        result.cell_col = std::clamp(static_cast<int>(std::floor((lon - grid.lon0()) / grid.dlon())),
                                     0, grid.cols() - 1);
        return true;
    });

    return result;
}

GeolocationResult geolocate_pixel(const terrain::TerrainGrid& grid, const VehicleState& state,
                                  const optics::CameraModel& cam, double px_x, double px_y,
                                  const CastOptions& opts) {
    Vec3 ray_cam = optics::pixel_to_camera_ray(cam, px_x, px_y);
    Vec3 dir = optics::camera_ray_to_world(ray_cam, state.attitude);
    return cast_ray(grid, state.position, dir, opts);
}

GeolocationResult geolocate_detection(const terrain::TerrainGrid& grid, const VehicleState& state,
                                      const optics::CameraModel& cam, double x0, double y0,
                                      double x1, double y1, const CastOptions& opts) {
    if (!(x0 < x1) || !(y0 < y1))
        throw ValidationError("geolocate_detection: degenerate bounding box");
    if (x0 < 0 || y0 < 0 || x1 > cam.width_px || y1 > cam.height_px)
        throw ValidationError("geolocate_detection: bounding box outside frame");
    return geolocate_pixel(grid, state, cam, 0.5 * (x0 + x1), 0.5 * (y0 + y1), opts);
}

} // namespace tds::geolocate
