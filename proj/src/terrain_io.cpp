#include "tds/error.hpp"
#include "tds/terrain.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace tds::terrain {

using nlohmann::json;

namespace {

json geometry_to_json(const spatial::Geometry2D& g) {
    json j;
    if (const auto* p = std::get_if<spatial::Point2>(&g)) {
        j["type"] = "Point";
        j["coordinates"] = {p->x, p->y};
    } else if (const auto* l = std::get_if<spatial::Polyline2>(&g)) {
        j["type"] = "LineString";
        json coords = json::array();
        for (const auto& v : l->vertices) coords.push_back({v.x, v.y});
        j["coordinates"] = std::move(coords);
    } else {
        const auto& poly = std::get<spatial::Polygon2>(g);
        j["type"] = "Polygon";
        json ring = json::array();
        for (const auto& v : poly.vertices) ring.push_back({v.x, v.y});
        ring.push_back({poly.vertices.front().x, poly.vertices.front().y}); // close
        j["coordinates"] = json::array({std::move(ring)});
    }
    return j;
}

spatial::Point2 coord_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ValidationError("geometry coordinate must be a [lon, lat] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

spatial::Geometry2D geometry_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    const json& coords = j.at("coordinates");
    if (type == "Point") return coord_from_json(coords);
    if (type == "LineString") {
        spatial::Polyline2 line;
        for (const auto& c : coords) line.vertices.push_back(coord_from_json(c));
        if (line.vertices.size() < 2)
            throw ValidationError("LineString needs at least 2 vertices");
        return line;
    }
    if (type == "Polygon") {
        if (!coords.is_array() || coords.empty())
            throw ValidationError("Polygon needs one ring");
        spatial::Polygon2 poly;
        for (const auto& c : coords[0]) poly.vertices.push_back(coord_from_json(c));
        if (poly.vertices.size() >= 2) {
            const auto& a = poly.vertices.front();
            const auto& b = poly.vertices.back();
            if (a.x == b.x && a.y == b.y) poly.vertices.pop_back();
        }
        if (poly.vertices.size() < 3)
            throw ValidationError("Polygon ring needs at least 3 distinct vertices");
        return poly;
    }
    throw ValidationError("unknown geometry type: " + type);
}

} // namespace

void save_grid(const TerrainGrid& grid, const std::string& path) {
    json j;
    j["version"] = 1;
    j["datum"] = geodesy::datum_name(grid.datum());
    j["region"] = {grid.lat0(), grid.lon0(), grid.lat1(), grid.lon1()};
    j["cell_size_deg"] = {grid.dlat(), grid.dlon()};
    j["rows"] = grid.rows();
    j["cols"] = grid.cols();
    j["elevation_m"] = grid.elevation_array();
    json cover = json::array();
    json prov = json::array();
    for (int r = 0; r < grid.rows(); ++r)
        for (int c = 0; c < grid.cols(); ++c) {
            cover.push_back(static_cast<int>(grid.land_cover(r, c)));
            prov.push_back(static_cast<int>(grid.provenance(r, c)));
        }
    j["land_cover"] = std::move(cover);
    j["provenance"] = std::move(prov);
    json feats = json::array();
    for (const Feature& f : grid.features()) {
        json fj;
        fj["id"] = f.id;
        fj["kind"] = feature_kind_name(f.kind);
        fj["geometry"] = geometry_to_json(f.geometry);
        feats.push_back(std::move(fj));
    }
    j["features"] = std::move(feats);

    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
    if (!out) throw Error("write failed: " + path);
}

TerrainGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("malformed grid file " + path + ": " + e.what());
    }

    try {
        int version = j.at("version").get<int>();
        if (version != 1)
            throw ValidationError("unsupported grid file version: " + std::to_string(version));

        TerrainGrid g;
        g.datum_ = geodesy::datum_from_name(j.at("datum").get<std::string>());
        const json& region = j.at("region");
        if (!region.is_array() || region.size() != 4)
            throw ValidationError("region must be [lat0, lon0, lat1, lon1]");
        g.lat0_ = region[0].get<double>();
        g.lon0_ = region[1].get<double>();
        double lat1 = region[2].get<double>();
        double lon1 = region[3].get<double>();
        const json& cell = j.at("cell_size_deg");
        g.dlat_ = cell.at(0).get<double>();
        g.dlon_ = cell.at(1).get<double>();
        g.rows_ = j.at("rows").get<int>();
        g.cols_ = j.at("cols").get<int>();
        if (g.rows_ <= 0 || g.cols_ <= 0 || !(g.dlat_ > 0) || !(g.dlon_ > 0))
            throw ValidationError("invalid grid dimensions");
        if (std::abs(g.lat0_ + g.rows_ * g.dlat_ - lat1) > 1e-9 ||
            std::abs(g.lon0_ + g.cols_ * g.dlon_ - lon1) > 1e-9)
            throw ValidationError("region extent inconsistent with rows/cols and cell size");

        std::size_t n = static_cast<std::size_t>(g.rows_) * g.cols_;
        const json& elev = j.at("elevation_m");
        const json& cover = j.at("land_cover");
        const json& prov = j.at("provenance");
        if (elev.size() != n || cover.size() != n || prov.size() != n)
            throw ValidationError("array length does not match rows*cols");
        g.elevation_.reserve(n);
        g.cover_.reserve(n);
        g.prov_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            double e = elev[i].get<double>();
            if (!std::isfinite(e)) throw ValidationError("non-finite elevation");
            g.elevation_.push_back(e);
            g.cover_.push_back(land_cover_from_code(cover[i].get<int>()));
            int pv = prov[i].get<int>();
            if (pv != 0 && pv != 1) throw ValidationError("unknown provenance code");
            g.prov_.push_back(static_cast<Provenance>(pv));
        }
        for (const auto& fj : j.at("features")) {
            Feature f;
            f.id = fj.at("id").get<std::int64_t>();
            f.kind = feature_kind_from_name(fj.at("kind").get<std::string>());
            f.geometry = geometry_from_json(fj.at("geometry"));
            g.features_.push_back(std::move(f));
        }
        g.build_indexes();
        return g;
    } catch (const json::exception& e) {
        throw ParseError("invalid grid file " + path + ": " + e.what());
    }
}

} // namespace tds::terrain
