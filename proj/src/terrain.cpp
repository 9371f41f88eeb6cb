#include "tds/terrain.hpp"

#include "tds/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tds::terrain {

std::string land_cover_name(LandCoverClass c) {
    switch (c) {
        case LandCoverClass::background: return "background";
        case LandCoverClass::woodland: return "woodland";
        case LandCoverClass::waterway: return "waterway";
        case LandCoverClass::road: return "road";
        case LandCoverClass::building: return "building";
        case LandCoverClass::grassland: return "grassland";
        case LandCoverClass::shrubland: return "shrubland";
        case LandCoverClass::wetland: return "wetland";
        case LandCoverClass::developed: return "developed";
    }
    return "background";
}

LandCoverClass land_cover_from_code(int code) {
    if (code < 0 || code > 8)
        throw ValidationError("unknown land cover code: " + std::to_string(code));
    return static_cast<LandCoverClass>(code);
}

std::string feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::water: return "water";
        case FeatureKind::road: return "road";
        case FeatureKind::trail: return "trail";
    }
    return "water";
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "water") return FeatureKind::water;
    if (name == "road") return FeatureKind::road;
    if (name == "trail") return FeatureKind::trail;
    throw ValidationError("unknown feature kind: " + name);
}

namespace {

int axis_cells(double lo, double hi, double step) {
    double n = (hi - lo) / step;
    int cells = static_cast<int>(std::ceil(n - 1e-9));
    return std::max(cells, 1);
}

} // namespace

void TerrainGrid::build_indexes() {
    std::vector<std::pair<spatial::Bbox2, std::int64_t>> cells;
    cells.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            spatial::Bbox2 b{lon0_ + c * dlon_, lat0_ + r * dlat_, lon0_ + (c + 1) * dlon_,
                             lat0_ + (r + 1) * dlat_};
            cells.emplace_back(b, static_cast<std::int64_t>(r) * cols_ + c);
        }
    }
    continuous_index_ = std::make_unique<spatial::StrTree>(cells);

    if (!features_.empty()) {
        std::vector<std::pair<spatial::Bbox2, std::int64_t>> fitems;
        fitems.reserve(features_.size());
        for (const Feature& f : features_)
            fitems.emplace_back(spatial::geometry_bbox(f.geometry), f.id);
        discrete_index_ = std::make_unique<spatial::StrTree>(fitems);
    } else {
        discrete_index_.reset();
    }

    auto [mn, mx] = std::minmax_element(elevation_.begin(), elevation_.end());
    min_elev_ = *mn;
    max_elev_ = *mx;
}

std::vector<std::int64_t> TerrainGrid::features_crossing_cell(int row, int col) const {
    std::vector<std::int64_t> out;
    if (!discrete_index_) return out;
    spatial::Bbox2 cell_box{lon0_ + col * dlon_, lat0_ + row * dlat_, lon0_ + (col + 1) * dlon_,
                            lat0_ + (row + 1) * dlat_};
    spatial::Polygon2 quad{{{cell_box.xlo, cell_box.ylo},
                            {cell_box.xhi, cell_box.ylo},
                            {cell_box.xhi, cell_box.yhi},
                            {cell_box.xlo, cell_box.yhi}}};
    for (std::int64_t fid : discrete_index_->query_bbox(cell_box)) {
        const Feature* feat = nullptr;
        for (const Feature& f : features_)
            if (f.id == fid) {
                feat = &f;
                break;
            }
        if (feat && spatial::intersects(spatial::Geometry2D{quad}, feat->geometry))
            out.push_back(fid);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TerrainCell TerrainGrid::cell(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
        throw ValidationError("cell index out of range");
    TerrainCell c;
    double la = lat0_ + row * dlat_, lb = la + dlat_;
    double oa = lon0_ + col * dlon_, ob = oa + dlon_;
    c.corners = {spatial::Point2{oa, la}, {ob, la}, {ob, lb}, {oa, lb}};
    c.centroid = {centroid_lon(col), centroid_lat(row)};
    c.elevation_m = elevation(row, col);
    c.datum = datum_;
    c.land_cover = land_cover(row, col);
    c.provenance = provenance(row, col);
    c.discrete_features = features_crossing_cell(row, col);
    return c;
}

TerrainGrid::BilinearNodes TerrainGrid::bilinear_nodes(double lat, double lon) const {
    BilinearNodes n{};
    double fu = (lat - lat0_) / dlat_ - 0.5;
    double fv = (lon - lon0_) / dlon_ - 0.5;
    if (rows_ == 1) {
        n.r0 = n.r1 = 0;
        n.u = 0;
    } else {
        int r0 = static_cast<int>(std::floor(fu));
        r0 = std::clamp(r0, 0, rows_ - 2);
        n.r0 = r0;
        n.r1 = r0 + 1;
        n.u = std::clamp(fu - r0, 0.0, 1.0);
    }
    if (cols_ == 1) {
        n.c0 = n.c1 = 0;
        n.v = 0;
    } else {
        int c0 = static_cast<int>(std::floor(fv));
        c0 = std::clamp(c0, 0, cols_ - 2);
        n.c0 = c0;
        n.c1 = c0 + 1;
        n.v = std::clamp(fv - c0, 0.0, 1.0);
    }
    return n;
}

double TerrainGrid::elevation_at(double lat, double lon, ElevationMode mode) const {
    if (!in_region(lat, lon))
        throw OutOfRegionError("elevation_at: point outside region");
    if (mode == ElevationMode::NEAREST) {
        std::int64_t id = continuous_index_->nearest(lon, lat);
        return elevation_[static_cast<std::size_t>(id)];
    }
    BilinearNodes n = bilinear_nodes(lat, lon);
    double e00 = elevation(n.r0, n.c0), e10 = elevation(n.r1, n.c0);
    double e01 = elevation(n.r0, n.c1), e11 = elevation(n.r1, n.c1);
    return e00 * (1 - n.u) * (1 - n.v) + e10 * n.u * (1 - n.v) + e01 * (1 - n.u) * n.v +
           e11 * n.u * n.v;
}

CellInfo TerrainGrid::query_point(double lat, double lon) const {
    if (!in_region(lat, lon))
        throw OutOfRegionError("query_point: point outside region");
    std::int64_t id = continuous_index_->nearest(lon, lat);
    CellInfo info;
    info.row = static_cast<int>(id / cols_);
    info.col = static_cast<int>(id % cols_);
    info.elevation_m = elevation(info.row, info.col);
    info.land_cover = land_cover(info.row, info.col);
    info.provenance = provenance(info.row, info.col);
    info.discrete_features = features_crossing_cell(info.row, info.col);
    return info;
}

TerrainGrid build_grid(double lat_min, double lon_min, double lat_max, double lon_max,
                       double cell_dlat, double cell_dlon,
                       const std::function<double(double, double)>& elevation_sampler,
                       const std::function<LandCoverClass(double, double)>& landcover_sampler,
                       Datum datum, std::vector<Feature> features) {
    if (!(lat_max > lat_min) || !(lon_max > lon_min))
        throw ValidationError("build_grid: degenerate region");
    if (!(cell_dlat > 0) || !(cell_dlon > 0))
        throw ValidationError("build_grid: cell size must be positive");
    double approx = ((lat_max - lat_min) / cell_dlat) * ((lon_max - lon_min) / cell_dlon);
    if (approx > 1e7)
        throw ValidationError("build_grid: cell count " + std::to_string(approx) +
                              " exceeds 1e7");

    TerrainGrid g;
    g.lat0_ = lat_min;
    g.lon0_ = lon_min;
    g.dlat_ = cell_dlat;
    g.dlon_ = cell_dlon;
    g.rows_ = axis_cells(lat_min, lat_max, cell_dlat);
    g.cols_ = axis_cells(lon_min, lon_max, cell_dlon);
    g.datum_ = datum;
    std::size_t n = static_cast<std::size_t>(g.rows_) * g.cols_;
    g.elevation_.resize(n);
    g.cover_.resize(n);
    g.prov_.assign(n, Provenance::BASE_USGS);
    for (int r = 0; r < g.rows_; ++r) {
        double clat = g.centroid_lat(r);
        for (int c = 0; c < g.cols_; ++c) {
            double clon = g.centroid_lon(c);
            double e = elevation_sampler(clat, clon);
            if (!std::isfinite(e))
                throw ValidationError("build_grid: non-finite elevation sample");
            g.elevation_[g.idx(r, c)] = e;
            g.cover_[g.idx(r, c)] = landcover_sampler(clat, clon);
        }
    }
    g.features_ = std::move(features);
    g.build_indexes();
    return g;
}

TerrainGrid merge_layers(const TerrainGrid& base, const std::vector<LandCoverClass>& cv_raster) {
    std::size_t n = static_cast<std::size_t>(base.rows_) * base.cols_;
    if (cv_raster.size() != n)
        throw ValidationError("merge_layers: raster size " + std::to_string(cv_raster.size()) +
                              " != grid cells " + std::to_string(n));

    // Water attribute of a base cell: waterway land cover or a crossing
    // discrete water feature.
    std::vector<char> water(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (base.cover_[i] == LandCoverClass::waterway) water[i] = 1;
    if (base.discrete_index_) {
        for (const Feature& f : base.features_) {
            if (f.kind != FeatureKind::water) continue;
            spatial::Bbox2 fb = spatial::geometry_bbox(f.geometry);
            for (std::int64_t cid : base.continuous_index_->query_bbox(fb)) {
                int r = static_cast<int>(cid / base.cols_);
                int c = static_cast<int>(cid % base.cols_);
                if (water[base.idx(r, c)]) continue;
                spatial::Polygon2 quad{{{base.lon0_ + c * base.dlon_, base.lat0_ + r * base.dlat_},
                                        {base.lon0_ + (c + 1) * base.dlon_, base.lat0_ + r * base.dlat_},
                                        {base.lon0_ + (c + 1) * base.dlon_, base.lat0_ + (r + 1) * base.dlat_},
                                        {base.lon0_ + c * base.dlon_, base.lat0_ + (r + 1) * base.dlat_}}};
                if (spatial::intersects(spatial::Geometry2D{quad}, f.geometry))
                    water[base.idx(r, c)] = 1;
            }
        }
    }
    auto water_in_neighborhood = [&](int r, int c) {
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= base.rows_ || cc < 0 || cc >= base.cols_) continue;
                if (water[base.idx(rr, cc)]) return true;
            }
        return false;
    };

    TerrainGrid out;
    out.lat0_ = base.lat0_;
    out.lon0_ = base.lon0_;
    out.dlat_ = base.dlat_;
    out.dlon_ = base.dlon_;
    out.rows_ = base.rows_;
    out.cols_ = base.cols_;
    out.datum_ = base.datum_;
    out.elevation_ = base.elevation_; // elevation is never altered by the merge
    out.cover_ = base.cover_;
    out.prov_ = base.prov_;
    out.features_ = base.features_;

    for (int r = 0; r < base.rows_; ++r) {
        for (int c = 0; c < base.cols_; ++c) {
            std::size_t i = base.idx(r, c);
            LandCoverClass cv = cv_raster[i];
            switch (cv) {
                case LandCoverClass::building:
                case LandCoverClass::woodland:
                case LandCoverClass::road:
                    out.cover_[i] = cv;
                    out.prov_[i] = Provenance::CV_SEGMENTATION;
                    break;
                case LandCoverClass::waterway:
                    if (water_in_neighborhood(r, c)) {
                        out.cover_[i] = cv;
                        out.prov_[i] = Provenance::CV_SEGMENTATION;
                    }
                    break;
                default:
                    break; // other classes never overwrite the base layer
            }
        }
    }
    out.build_indexes();
    return out;
}

std::string synth_kind_name(SynthKind k) {
    switch (k) {
        case SynthKind::FLAT: return "flat";
        case SynthKind::GULLY: return "gully";
        case SynthKind::HILL: return "hill";
        case SynthKind::RIDGE: return "ridge";
        case SynthKind::PEAKS: return "peaks";
    }
    return "flat";
}

SynthKind synth_kind_from_name(const std::string& name) {
    if (name == "flat") return SynthKind::FLAT;
    if (name == "gully") return SynthKind::GULLY;
    if (name == "hill") return SynthKind::HILL;
    if (name == "ridge") return SynthKind::RIDGE;
    if (name == "peaks") return SynthKind::PEAKS;
    throw ValidationError("unknown synthetic terrain kind: " + name);
}

TerrainGrid synth_terrain(SynthKind kind, const SynthParams& p) {
    if (p.ripple_m < 0 || p.ripple_m > 1.0)
        throw ValidationError("synth_terrain: ripple_m must be in [0, 1]");
    if (p.depth_m < 0 || p.rise_m < 0 || p.ridge_height_m < 0 || p.peaks_amplitude_m < 0)
        throw ValidationError("synth_terrain: negative feature size");

    int rows = axis_cells(p.lat_min, p.lat_max, p.cell_dlat);
    int cols = axis_cells(p.lon_min, p.lon_max, p.cell_dlon);
    double lat_ext = rows * p.cell_dlat;
    double lon_ext = cols * p.cell_dlon;

    // Trench/crest line aligned with a centroid column so the nominal depth
    // and height are realized exactly at sample points.
    double center_lon = p.lon_min + (cols / 2 + 0.5) * p.cell_dlon;
    double first_clat = p.lat_min + 0.5 * p.cell_dlat;
    double last_clat = p.lat_min + (rows - 0.5) * p.cell_dlat;

    std::function<double(double, double)> elev;
    switch (kind) {
        case SynthKind::FLAT:
            elev = [=](double lat, double lon) {
                double s = std::sin(2 * kPi * 3 * (lon - p.lon_min) / lon_ext) *
                           std::cos(2 * kPi * 2 * (lat - p.lat_min) / lat_ext);
                return p.base_elevation_m + 0.5 * p.ripple_m * s;
            };
            break;
        case SynthKind::GULLY: {
            double halfwidth = lon_ext / 4.0;
            elev = [=](double lat, double lon) {
                (void)lat;
                double u = std::min(std::abs(lon - center_lon) / halfwidth, 1.0);
                double c = std::cos(0.5 * kPi * u);
                return p.base_elevation_m - p.depth_m * c * c;
            };
            break;
        }
        case SynthKind::HILL:
            elev = [=](double lat, double lon) {
                (void)lon;
                double t = (lat - first_clat) / (last_clat - first_clat);
                return p.base_elevation_m + p.rise_m * std::clamp(t, 0.0, 1.0);
            };
            break;
        case SynthKind::RIDGE: {
            double halfwidth = p.ridge_halfwidth_cells * p.cell_dlon;
            elev = [=](double lat, double lon) {
                (void)lat;
                double u = std::abs(lon - center_lon) / halfwidth;
                return p.base_elevation_m + p.ridge_height_m * std::max(0.0, 1.0 - u);
            };
            break;
        }
        case SynthKind::PEAKS: {
            struct Peak {
                double fx, fy, amp;
            };
            const Peak peaks[3] = {{0.3, 0.3, 0.5}, {0.7, 0.5, 1.0}, {0.45, 0.75, 0.75}};
            double sigma_lat = lat_ext / 8.0, sigma_lon = lon_ext / 8.0;
            elev = [=](double lat, double lon) {
                double e = p.base_elevation_m;
                for (const Peak& pk : peaks) {
                    double dx = (lon - (p.lon_min + pk.fx * lon_ext)) / sigma_lon;
                    double dy = (lat - (p.lat_min + pk.fy * lat_ext)) / sigma_lat;
                    e += pk.amp * p.peaks_amplitude_m * std::exp(-0.5 * (dx * dx + dy * dy));
                }
                return e;
            };
            break;
        }
    }

    auto cover = [](double, double) { return LandCoverClass::grassland; };
    return build_grid(p.lat_min, p.lon_min, p.lat_max, p.lon_max, p.cell_dlat, p.cell_dlon, elev,
                      cover, p.datum);
}

} // namespace tds::terrain
