#pragma once

#include "tds/geodesy.hpp"
#include "tds/spatial_index.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tds::terrain {

using geodesy::Datum;

enum class LandCoverClass : std::uint8_t {
    background = 0,
    woodland = 1,
    waterway = 2,
    road = 3,
    building = 4,
    grassland = 5,
    shrubland = 6,
    wetland = 7,
    developed = 8,
};

/// Which pipeline produced a cell's land-cover value.
enum class Provenance : std::uint8_t { BASE_USGS = 0, CV_SEGMENTATION = 1 };

std::string land_cover_name(LandCoverClass c);
LandCoverClass land_cover_from_code(int code);

enum class FeatureKind : std::uint8_t { water = 0, road = 1, trail = 2 };

std::string feature_kind_name(FeatureKind k);
FeatureKind feature_kind_from_name(const std::string& name);

/// A discrete vector feature overlaid on the grid.
struct Feature {
    std::int64_t id = 0;
    FeatureKind kind = FeatureKind::water;
    spatial::Geometry2D geometry;
};

/// Value view of one grid cell: corner coordinates, centroid, elevation, land
/// cover, and the ids of discrete features crossing the cell. Corners and
/// centroid are (x=lon, y=lat) degrees.
struct TerrainCell {
    std::array<spatial::Point2, 4> corners; // SW, SE, NE, NW
    spatial::Point2 centroid;
    double elevation_m = 0;
    Datum datum = Datum::ELLIPSOID_WGS84;
    LandCoverClass land_cover = LandCoverClass::background;
    Provenance provenance = Provenance::BASE_USGS;
    std::vector<std::int64_t> discrete_features;
};

struct CellInfo {
    int row = 0, col = 0;
    double elevation_m = 0;
    LandCoverClass land_cover = LandCoverClass::background;
    Provenance provenance = Provenance::BASE_USGS;
    std::vector<std::int64_t> discrete_features;
};

enum class ElevationMode { NEAREST, BILINEAR };

/// Gridded terrain model ("terrain digital shadow"): rows x cols of cells,
/// centroid-sampled elevation and land cover, discrete vector features, and
/// two STR-tree indexes (cell bboxes; feature bboxes). Immutable after build
/// or load; concurrent reads are unrestricted.
class TerrainGrid {
public:
    // geometry
    double lat0() const { return lat0_; }
    double lon0() const { return lon0_; }
    double dlat() const { return dlat_; }
    double dlon() const { return dlon_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double lat1() const { return lat0_ + rows_ * dlat_; }
    double lon1() const { return lon0_ + cols_ * dlon_; }
    Datum datum() const { return datum_; }

    bool in_region(double lat, double lon) const {
        return lat >= lat0() && lat <= lat1() && lon >= lon0() && lon <= lon1();
    }
    double centroid_lat(int row) const { return lat0_ + (row + 0.5) * dlat_; }
    double centroid_lon(int col) const { return lon0_ + (col + 0.5) * dlon_; }

    double elevation(int row, int col) const { return elevation_[idx(row, col)]; }
    LandCoverClass land_cover(int row, int col) const { return cover_[idx(row, col)]; }
    Provenance provenance(int row, int col) const { return prov_[idx(row, col)]; }
    double min_elevation() const { return min_elev_; }
    double max_elevation() const { return max_elev_; }

    const std::vector<double>& elevation_array() const { return elevation_; }
    const std::vector<Feature>& features() const { return features_; }
    const spatial::StrTree& continuous_index() const { return *continuous_index_; }
    const spatial::StrTree* discrete_index() const { return discrete_index_.get(); }

    /// Full cell view, feature attribution included.
    TerrainCell cell(int row, int col) const;

    /// Point elevation query. NEAREST follows the nearest cell centroid via
    /// the continuous index; BILINEAR blends the four surrounding centroids,
    /// clamped at the region border. Out-of-region points are rejected.
    double elevation_at(double lat, double lon, ElevationMode mode) const;

    /// Continuous attributes of the nearest cell plus discrete features whose
    /// geometry intersects that cell's quad.
    CellInfo query_point(double lat, double lon) const;

    /// Bilinear surface nodes and weights at (lat, lon); exposed so the ray
    /// caster intersects exactly the surface this class interpolates.
    struct BilinearNodes {
        int r0, r1, c0, c1; // clamped centroid indices
        double u, v;        // weights along lat (u) and lon (v), in [0, 1]
    };
    BilinearNodes bilinear_nodes(double lat, double lon) const;

    friend TerrainGrid build_grid(double lat_min, double lon_min, double lat_max,
                                  double lon_max, double cell_dlat, double cell_dlon,
                                  const std::function<double(double, double)>& elevation_sampler,
                                  const std::function<LandCoverClass(double, double)>& landcover_sampler,
                                  Datum datum, std::vector<Feature> features);
    friend TerrainGrid merge_layers(const TerrainGrid& base,
                                    const std::vector<LandCoverClass>& cv_raster);
    friend TerrainGrid load_grid(const std::string& path);

private:
    TerrainGrid() = default;
    void build_indexes();
    std::size_t idx(int row, int col) const {
        return static_cast<std::size_t>(row) * cols_ + col;
    }
    std::vector<std::int64_t> features_crossing_cell(int row, int col) const;

    double lat0_ = 0, lon0_ = 0;
    double dlat_ = 0, dlon_ = 0;
    int rows_ = 0, cols_ = 0;
    Datum datum_ = Datum::ELLIPSOID_WGS84;
    double min_elev_ = 0, max_elev_ = 0;
    std::vector<double> elevation_;
    std::vector<LandCoverClass> cover_;
    std::vector<Provenance> prov_;
    std::vector<Feature> features_;
    std::unique_ptr<spatial::StrTree> continuous_index_;
    std::unique_ptr<spatial::StrTree> discrete_index_; // null when no features
};

/// Builds a grid over [lat_min, lat_max] x [lon_min, lon_max] with centroids
/// at min + (i+0.5)*cell_size, sampling elevation and land cover per centroid.
/// The effective region is the requested one rounded up to whole cells.
/// Rejects degenerate regions and cell counts above 10^7.
TerrainGrid build_grid(double lat_min, double lon_min, double lat_max, double lon_max,
                       double cell_dlat, double cell_dlon,
                       const std::function<double(double, double)>& elevation_sampler,
                       const std::function<LandCoverClass(double, double)>& landcover_sampler,
                       Datum datum = Datum::ELLIPSOID_WGS84,
                       std::vector<Feature> features = {});

/// Fuses a segmented land-cover raster (row-major, same dimensions) into a
/// base grid. Elevation always comes from the base. Classes building,
/// woodland, and road overwrite; waterway is accepted only where the base
/// cell or an 8-neighbor already carries water (waterway class or a water
/// feature), which filters isolated false positives.
TerrainGrid merge_layers(const TerrainGrid& base, const std::vector<LandCoverClass>& cv_raster);

enum class SynthKind { FLAT, GULLY, HILL, RIDGE, PEAKS };

std::string synth_kind_name(SynthKind k);
SynthKind synth_kind_from_name(const std::string& name);

/// Parameters for the analytic terrain generators. All surfaces are
/// deterministic functions of (lat, lon); feature lines (gully trench,
/// ridge crest) are aligned to a centroid so the stated elevation deltas are
/// realized exactly at sample points.
struct SynthParams {
    double lat_min = 36.2080, lon_min = -96.0120;
    double lat_max = 36.2160, lon_max = -96.0020;
    double cell_dlat = 1e-4, cell_dlon = 1e-4;
    double base_elevation_m = 274.0;
    double ripple_m = 0.8;       // FLAT: peak-to-peak ripple, <= 1 m
    double depth_m = 6.0;        // GULLY: trench depth
    double rise_m = 16.0;        // HILL: total rise along the south-north axis
    double ridge_height_m = 8.0; // RIDGE: crest height
    double ridge_halfwidth_cells = 1.5;
    double peaks_amplitude_m = 120.0;
    Datum datum = Datum::ELLIPSOID_WGS84;
};

TerrainGrid synth_terrain(SynthKind kind, const SynthParams& params = {});

/// Lossless JSON round trip of the full grid. load_grid validates invariants
/// and rebuilds both indexes; malformed files raise ParseError and unknown
/// versions raise ValidationError.
void save_grid(const TerrainGrid& grid, const std::string& path);
TerrainGrid load_grid(const std::string& path);

} // namespace tds::terrain
