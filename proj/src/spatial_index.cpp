#include "tds/spatial_index.hpp"

#include "tds/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace tds::spatial {

Bbox2 Bbox2::empty() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, -inf, -inf};
}

void Bbox2::expand(const Bbox2& o) {
    xlo = std::min(xlo, o.xlo);
    ylo = std::min(ylo, o.ylo);
    xhi = std::max(xhi, o.xhi);
    yhi = std::max(yhi, o.yhi);
}

double mindist_sq(const Bbox2& b, double x, double y) {
    double dx = x < b.xlo ? b.xlo - x : (x > b.xhi ? x - b.xhi : 0.0);
    double dy = y < b.ylo ? b.ylo - y : (y > b.yhi ? y - b.yhi : 0.0);
    return dx * dx + dy * dy;
}

namespace {

// Sort-tile-recursive ordering of one level: stable-sort by x of center,
// partition into ceil(sqrt(ceil(n/c))) vertical slices, stable-sort each
// slice by y of center. Returns run boundaries of length <= c.
template <typename CenterX, typename CenterY>
std::vector<std::pair<std::size_t, std::size_t>> str_order(std::vector<std::int32_t>& level,
                                                           std::size_t c, CenterX cx, CenterY cy) {
    std::stable_sort(level.begin(), level.end(),
                     [&](std::int32_t a, std::int32_t b) { return cx(a) < cx(b); });
    std::size_t n = level.size();
    std::size_t pages = (n + c - 1) / c;
    std::size_t slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(pages))));
    std::size_t slice_len = slices * c;

    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t s0 = 0; s0 < n; s0 += slice_len) {
        std::size_t s1 = std::min(s0 + slice_len, n);
        std::stable_sort(level.begin() + s0, level.begin() + s1,
                         [&](std::int32_t a, std::int32_t b) { return cy(a) < cy(b); });
        for (std::size_t r0 = s0; r0 < s1; r0 += c)
            runs.emplace_back(r0, std::min(r0 + c, s1));
    }
    return runs;
}

} // namespace

StrTree::StrTree(const std::vector<std::pair<Bbox2, std::int64_t>>& items, int node_capacity) {
    if (items.empty()) throw ValidationError("StrTree: empty input");
    if (node_capacity < 2) throw ValidationError("StrTree: node_capacity must be >= 2");
    node_capacity_ = node_capacity;
    item_count_ = items.size();
    const std::size_t c = static_cast<std::size_t>(node_capacity);

    entries_.reserve(items.size());
    for (const auto& [bbox, id] : items) entries_.push_back({bbox, id});

    // Leaf level: order entries by STR, then store them contiguously so each
    // leaf references a run [first, first+count) of entries_.
    std::vector<std::int32_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
    auto leaf_runs = str_order(
        order, c, [&](std::int32_t i) { return entries_[i].bbox.cx(); },
        [&](std::int32_t i) { return entries_[i].bbox.cy(); });

    std::vector<Entry> reordered(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) reordered[i] = entries_[order[i]];
    entries_ = std::move(reordered);

    std::vector<std::int32_t> level;
    for (auto [r0, r1] : leaf_runs) {
        Node node;
        node.is_leaf = true;
        node.first = static_cast<std::int32_t>(r0);
        node.count = static_cast<std::int32_t>(r1 - r0);
        node.bbox = Bbox2::empty();
        for (std::size_t k = r0; k < r1; ++k) node.bbox.expand(entries_[k].bbox);
        level.push_back(static_cast<std::int32_t>(nodes_.size()));
        nodes_.push_back(node);
    }

    height_ = 1;
    while (level.size() > 1) {
        auto runs = str_order(
            level, c, [&](std::int32_t i) { return nodes_[i].bbox.cx(); },
            [&](std::int32_t i) { return nodes_[i].bbox.cy(); });
        std::vector<std::int32_t> parents;
        for (auto [r0, r1] : runs) {
            Node node;
            node.is_leaf = false;
            node.first = static_cast<std::int32_t>(child_runs_.size());
            node.count = static_cast<std::int32_t>(r1 - r0);
            node.bbox = Bbox2::empty();
            for (std::size_t k = r0; k < r1; ++k) {
                child_runs_.push_back(level[k]);
                node.bbox.expand(nodes_[level[k]].bbox);
            }
            parents.push_back(static_cast<std::int32_t>(nodes_.size()));
            nodes_.push_back(node);
        }
        level = std::move(parents);
        ++height_;
    }
    root_ = level.front();
}

std::vector<std::int64_t> StrTree::query_bbox(const Bbox2& query) const {
    std::vector<std::int64_t> out;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        std::int32_t ni = stack.back();
        stack.pop_back();
        const Node& node = nodes_[ni];
        if (!node.bbox.intersects(query)) continue;
        if (node.is_leaf) {
            for (std::int32_t i = 0; i < node.count; ++i) {
                const Entry& e = entries_[node.first + i];
                if (e.bbox.intersects(query)) out.push_back(e.id);
            }
        } else {
            for (std::int32_t i = 0; i < node.count; ++i)
                stack.push_back(child_runs_[node.first + i]);
        }
    }
    return out;
}

std::int64_t StrTree::nearest(double x, double y) const {
    // Best-first search. mindist to a node bbox lower-bounds the centroid
    // distance of anything stored beneath it (child boxes are contained, so
    // their centroids are inside). Nodes at a bound equal to the incumbent
    // distance must still be explored to honor smallest-id tie-breaking.
    struct Cand {
        double d2;
        std::int32_t node;
    };
    auto cmp = [](const Cand& a, const Cand& b) { return a.d2 > b.d2; };
    std::priority_queue<Cand, std::vector<Cand>, decltype(cmp)> pq(cmp);
    pq.push({mindist_sq(nodes_[root_].bbox, x, y), root_});

    double best_d2 = std::numeric_limits<double>::infinity();
    std::int64_t best_id = std::numeric_limits<std::int64_t>::max();
    bool found = false;

    while (!pq.empty()) {
        Cand c = pq.top();
        pq.pop();
        if (found && c.d2 > best_d2) break;
        const Node& node = nodes_[c.node];
        if (node.is_leaf) {
            for (std::int32_t i = 0; i < node.count; ++i) {
                const Entry& e = entries_[node.first + i];
                double dx = e.bbox.cx() - x;
                double dy = e.bbox.cy() - y;
                double d2 = dx * dx + dy * dy;
                if (!found || d2 < best_d2 || (d2 == best_d2 && e.id < best_id)) {
                    best_d2 = d2;
                    best_id = e.id;
                    found = true;
                }
            }
        } else {
            for (std::int32_t i = 0; i < node.count; ++i) {
                std::int32_t ch = child_runs_[node.first + i];
                double d2 = mindist_sq(nodes_[ch].bbox, x, y);
                if (!found || d2 <= best_d2) pq.push({d2, ch});
            }
        }
    }
    return best_id;
}

const Bbox2& StrTree::root_bbox() const { return nodes_[root_].bbox; }

std::vector<StrTree::NodeView> StrTree::nodes() const {
    std::vector<NodeView> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) {
        NodeView v;
        v.bbox = n.bbox;
        v.is_leaf = n.is_leaf;
        if (n.is_leaf) {
            for (std::int32_t i = 0; i < n.count; ++i) {
                v.child_bboxes.push_back(entries_[n.first + i].bbox);
                v.leaf_ids.push_back(entries_[n.first + i].id);
            }
        } else {
            for (std::int32_t i = 0; i < n.count; ++i)
                v.child_bboxes.push_back(nodes_[child_runs_[n.first + i]].bbox);
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Geometry predicates

Bbox2 geometry_bbox(const Geometry2D& g) {
    Bbox2 b = Bbox2::empty();
    auto add = [&](const Point2& p) {
        b.xlo = std::min(b.xlo, p.x);
        b.ylo = std::min(b.ylo, p.y);
        b.xhi = std::max(b.xhi, p.x);
        b.yhi = std::max(b.yhi, p.y);
    };
    if (const auto* p = std::get_if<Point2>(&g)) {
        add(*p);
    } else if (const auto* l = std::get_if<Polyline2>(&g)) {
        for (const auto& v : l->vertices) add(v);
    } else {
        for (const auto& v : std::get<Polygon2>(g).vertices) add(v);
    }
    return b;
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orient(const Point2& o, const Point2& a, const Point2& b) {
    double c = cross(o, a, b);
    if (c > 0) return 1;
    if (c < 0) return -1;
    return 0;
}

void validate_polygon(const Polygon2& poly) {
    if (poly.vertices.size() < 3)
        throw ValidationError("polygon needs at least 3 vertices");
    if (polygon_area(poly) == 0.0)
        throw ValidationError("degenerate zero-area polygon");
}

} // namespace

bool point_on_segment(const Point2& p, const Point2& a, const Point2& b) {
    if (orient(a, b, p) != 0) return false;
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    int o1 = orient(a, b, c);
    int o2 = orient(a, b, d);
    int o3 = orient(c, d, a);
    int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && point_on_segment(c, a, b)) return true;
    if (o2 == 0 && point_on_segment(d, a, b)) return true;
    if (o3 == 0 && point_on_segment(a, c, d)) return true;
    if (o4 == 0 && point_on_segment(b, c, d)) return true;
    return false;
}

double polygon_area(const Polygon2& poly) {
    double s = 0;
    std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly.vertices[i];
        const Point2& q = poly.vertices[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

bool point_in_polygon(const Point2& p, const Polygon2& poly) {
    std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_on_segment(p, poly.vertices[i], poly.vertices[(i + 1) % n])) return true;
    }
    // even-odd ray crossing, ray toward +x
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = poly.vertices[i];
        const Point2& b = poly.vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

namespace {

bool poly_poly(const Polygon2& a, const Polygon2& b) {
    std::size_t n = a.vertices.size(), m = b.vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (segments_intersect(a.vertices[i], a.vertices[(i + 1) % n], b.vertices[j],
                                   b.vertices[(j + 1) % m]))
                return true;
    return point_in_polygon(a.vertices[0], b) || point_in_polygon(b.vertices[0], a);
}

bool line_poly(const Polyline2& l, const Polygon2& poly) {
    std::size_t m = poly.vertices.size();
    for (std::size_t i = 0; i + 1 < l.vertices.size(); ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (segments_intersect(l.vertices[i], l.vertices[i + 1], poly.vertices[j],
                                   poly.vertices[(j + 1) % m]))
                return true;
    return point_in_polygon(l.vertices[0], poly);
}

bool line_line(const Polyline2& a, const Polyline2& b) {
    for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i)
        for (std::size_t j = 0; j + 1 < b.vertices.size(); ++j)
            if (segments_intersect(a.vertices[i], a.vertices[i + 1], b.vertices[j],
                                   b.vertices[j + 1]))
                return true;
    return false;
}

bool point_line(const Point2& p, const Polyline2& l) {
    for (std::size_t i = 0; i + 1 < l.vertices.size(); ++i)
        if (point_on_segment(p, l.vertices[i], l.vertices[i + 1])) return true;
    return false;
}

} // namespace

bool intersects(const Geometry2D& a, const Geometry2D& b) {
    if (const auto* pa = std::get_if<Polygon2>(&a)) validate_polygon(*pa);
    if (const auto* pb = std::get_if<Polygon2>(&b)) validate_polygon(*pb);
    if (const auto* la = std::get_if<Polyline2>(&a)) {
        if (la->vertices.size() < 2) throw ValidationError("polyline needs >= 2 vertices");
    }
    if (const auto* lb = std::get_if<Polyline2>(&b)) {
        if (lb->vertices.size() < 2) throw ValidationError("polyline needs >= 2 vertices");
    }

    return std::visit(
        [](const auto& x, const auto& y) -> bool {
            using X = std::decay_t<decltype(x)>;
            using Y = std::decay_t<decltype(y)>;
            if constexpr (std::is_same_v<X, Point2> && std::is_same_v<Y, Point2>)
                return x.x == y.x && x.y == y.y;
            else if constexpr (std::is_same_v<X, Point2> && std::is_same_v<Y, Polyline2>)
                return point_line(x, y);
            else if constexpr (std::is_same_v<X, Point2> && std::is_same_v<Y, Polygon2>)
                return point_in_polygon(x, y);
            else if constexpr (std::is_same_v<X, Polyline2> && std::is_same_v<Y, Point2>)
                return point_line(y, x);
            else if constexpr (std::is_same_v<X, Polyline2> && std::is_same_v<Y, Polyline2>)
                return line_line(x, y);
            else if constexpr (std::is_same_v<X, Polyline2> && std::is_same_v<Y, Polygon2>)
                return line_poly(x, y);
            else if constexpr (std::is_same_v<X, Polygon2> && std::is_same_v<Y, Point2>)
                return point_in_polygon(y, x);
            else if constexpr (std::is_same_v<X, Polygon2> && std::is_same_v<Y, Polyline2>)
                return line_poly(y, x);
            else
                return poly_poly(x, y);
        },
        a, b);
}

} // namespace tds::spatial
