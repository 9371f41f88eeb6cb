#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace tds::spatial {

/// Closed axis-aligned box. Throughout this module x is longitude and y is
/// latitude, both in degrees.
struct Bbox2 {
    double xlo = 0, ylo = 0, xhi = 0, yhi = 0;

    static Bbox2 empty();

    bool intersects(const Bbox2& o) const {
        return xlo <= o.xhi && o.xlo <= xhi && ylo <= o.yhi && o.ylo <= yhi;
    }
    bool contains(const Bbox2& o) const {
        return xlo <= o.xlo && o.xhi <= xhi && ylo <= o.ylo && o.yhi <= yhi;
    }
    bool contains_point(double x, double y) const {
        return xlo <= x && x <= xhi && ylo <= y && y <= yhi;
    }
    void expand(const Bbox2& o);
    double cx() const { return 0.5 * (xlo + xhi); }
    double cy() const { return 0.5 * (ylo + yhi); }
};

/// Squared Cartesian distance from a point to the closest point of a box,
/// zero if inside.
double mindist_sq(const Bbox2& b, double x, double y);

/// Bulk-loaded, query-only R-tree packed with the sort-tile-recursive
/// algorithm. Immutable after build; concurrent queries are safe.
class StrTree {
public:
    /// Packs (bbox, item_id) entries with the given node capacity.
    /// Rejects empty input and capacity < 2. Building is deterministic:
    /// ties keep input order.
    StrTree(const std::vector<std::pair<Bbox2, std::int64_t>>& items, int node_capacity = 16);

    /// All item ids whose stored bbox intersects the query box (closed
    /// intervals on both axes).
    std::vector<std::int64_t> query_bbox(const Bbox2& query) const;

    /// The id whose stored-bbox centroid minimizes Cartesian distance to
    /// (x, y) in degree space; ties broken by smallest id.
    std::int64_t nearest(double x, double y) const;

    std::size_t item_count() const { return item_count_; }
    int node_capacity() const { return node_capacity_; }
    const Bbox2& root_bbox() const;
    int height() const { return height_; }

    /// Structural audit hooks for tests.
    struct NodeView {
        Bbox2 bbox;
        bool is_leaf;
        std::vector<Bbox2> child_bboxes;
        std::vector<std::int64_t> leaf_ids; // only for leaves
    };
    std::vector<NodeView> nodes() const;

private:
    struct Node {
        Bbox2 bbox;
        std::int32_t first = 0; // child node index, or entry index for leaves
        std::int32_t count = 0;
        bool is_leaf = false;
    };
    struct Entry {
        Bbox2 bbox;
        std::int64_t id;
    };

    std::vector<Entry> entries_;
    std::vector<Node> nodes_;
    std::vector<std::int32_t> child_runs_; // flattened child-node index runs
    std::int32_t root_ = -1;
    std::size_t item_count_ = 0;
    int node_capacity_ = 16;
    int height_ = 0;
};

/// Point, polyline, or polygon over (lat, lon)-degree vertices. Vertices are
/// stored as (x=lon, y=lat) pairs. Polygons are simple, given as an open ring
/// (the closing edge is implicit); polylines need at least two vertices.
struct Point2 {
    double x = 0, y = 0;
};

struct Polyline2 {
    std::vector<Point2> vertices;
};

struct Polygon2 {
    std::vector<Point2> vertices; // open ring, >= 3 distinct vertices
};

using Geometry2D = std::variant<Point2, Polyline2, Polygon2>;

Bbox2 geometry_bbox(const Geometry2D& g);

/// True iff the geometries share at least one point. Boundary contact counts.
/// Point-in-polygon uses the even-odd rule; segment crossings use orientation
/// tests with collinear-overlap handling. Zero-area polygons are rejected.
bool intersects(const Geometry2D& a, const Geometry2D& b);

/// Helpers shared with the terrain module and the test oracles.
bool point_on_segment(const Point2& p, const Point2& a, const Point2& b);
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
bool point_in_polygon(const Point2& p, const Polygon2& poly); // boundary counts as inside
double polygon_area(const Polygon2& poly);                    // signed

} // namespace tds::spatial
