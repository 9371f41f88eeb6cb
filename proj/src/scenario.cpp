#include "tds/scenario.hpp"

#include "tds/error.hpp"
#include "tds/geolocate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace tds::harness {

using geolocate::GeoStatus;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct TrajectoryKnot {
    double t;
    GeodeticPosition pos;
};

struct Agent {
    AgentSpec spec;
    std::vector<TrajectoryKnot> knots;
    double yaw_deg = 0, pitch_deg = 0, roll_deg = 0;
    std::optional<GeodeticPosition> last_geolocation;
    std::optional<GeodeticPosition> last_received;
    double last_received_send_time = -std::numeric_limits<double>::infinity();
    int trial_counter = 0;
    uncertainty::NoiseModel noise; // spec noise with the derived seed

    GeodeticPosition position_at(double t) const {
        if (t <= knots.front().t) return knots.front().pos;
        if (t >= knots.back().t) return knots.back().pos;
        // last knot at or before t; ties pick the later knot so teleports win
        std::size_t k = 0;
        for (std::size_t i = 0; i < knots.size(); ++i)
            if (knots[i].t <= t) k = i;
        const TrajectoryKnot& a = knots[k];
        const TrajectoryKnot& b = knots[k + 1];
        if (!(b.t > a.t)) return b.pos;
        double u = (t - a.t) / (b.t - a.t);
        return GeodeticPosition(
            a.pos.latitude_deg + u * (b.pos.latitude_deg - a.pos.latitude_deg),
            a.pos.longitude_deg + u * (b.pos.longitude_deg - a.pos.longitude_deg),
            a.pos.altitude_m + u * (b.pos.altitude_m - a.pos.altitude_m), a.pos.datum);
    }
};

struct Delivery {
    double t = 0;
    long seq = 0;
    std::string from;
    GeodeticPosition coords;
    double send_time = 0;
};

void validate_scenario(const Scenario& s) {
    std::set<std::string> ids;
    for (const AgentSpec& a : s.agents) {
        if (a.id.empty()) throw ValidationError("scenario: empty agent id");
        if (!ids.insert(a.id).second)
            throw ValidationError("scenario: duplicate agent id " + a.id);
    }
    static const std::set<std::string> kTypes{"move_to",         "hover",   "stare_at",
                                              "detect_at_pixel", "publish_geolocation",
                                              "assert"};
    static const std::set<std::string> kAsserts{"yaw_to_target", "yaw_equals", "received_within",
                                                "bus_conservation", "delivered_range"};
    for (const ScriptEvent& e : s.script) {
        if (!kTypes.count(e.type))
            throw ValidationError("scenario: unknown event type " + e.type);
        bool needs_agent = e.type != "assert" || e.assert_kind == "yaw_to_target" ||
                           e.assert_kind == "yaw_equals" || e.assert_kind == "received_within";
        if (needs_agent && !ids.count(e.agent))
            throw ValidationError("scenario: event references unknown agent '" + e.agent + "'");
        if (e.type == "assert" && !kAsserts.count(e.assert_kind))
            throw ValidationError("scenario: unknown assert kind " + e.assert_kind);
        if (e.type == "move_to" && !e.position)
            throw ValidationError("scenario: move_to needs a position");
        if (e.type == "detect_at_pixel" && !e.pixel && !e.bbox)
            throw ValidationError("scenario: detect_at_pixel needs pixel or bbox");
        if (e.type == "stare_at" && e.source == "fixed" && !e.target)
            throw ValidationError("scenario: stare_at fixed needs a target");
    }
}

} // namespace

ScenarioReport run_scenario(const Scenario& s) {
    validate_scenario(s);

    terrain::TerrainGrid grid = s.grid_path ? terrain::load_grid(*s.grid_path)
                               : s.synth    ? terrain::synth_terrain(s.synth->first, s.synth->second)
                                            : terrain::synth_terrain(terrain::SynthKind::FLAT);

    std::map<std::string, Agent> agents;
    for (const AgentSpec& spec : s.agents) {
        Agent a;
        a.spec = spec;
        a.knots.push_back({0.0, spec.position});
        a.yaw_deg = spec.yaw_deg;
        a.pitch_deg = spec.pitch_deg;
        a.roll_deg = spec.roll_deg;
        a.noise = spec.noise;
        a.noise.seed = mix64(s.seed ^ fnv1a64(spec.id)) + spec.noise.seed;
        agents.emplace(spec.id, std::move(a));
    }

    // Stable order: script events keep author order for equal times;
    // deliveries are sequenced after all script events as they are created.
    std::vector<std::size_t> order(s.script.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s.script[a].t < s.script[b].t; });

    double end_time = s.script.empty() ? 0.0 : s.script[order.back()].t;

    auto cmp = [](const Delivery& a, const Delivery& b) {
        return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    };
    std::priority_queue<Delivery, std::vector<Delivery>, decltype(cmp)> deliveries(cmp);
    long next_seq = static_cast<long>(s.script.size());

    std::mt19937_64 bus_rng(mix64(s.seed));
    std::uniform_real_distribution<double> uniform01(0.0, 1.0);

    ScenarioReport rep;
    rep.tag = s.tag;
    double latency_sum = 0;

    auto deliver_due = [&](double now, long before_seq) {
        while (!deliveries.empty()) {
            const Delivery& d = deliveries.top();
            if (d.t > now || d.t > end_time) break;
            if (d.t == now && d.seq > before_seq) break;
            for (auto& [id, agent] : agents) {
                if (id == d.from) continue;
                if (d.send_time > agent.last_received_send_time) {
                    agent.last_received = d.coords;
                    agent.last_received_send_time = d.send_time;
                }
            }
            ++rep.bus.delivered;
            latency_sum += d.t - d.send_time;
            deliveries.pop();
        }
    };

    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const ScriptEvent& e = s.script[order[oi]];
        deliver_due(e.t, static_cast<long>(order[oi]));

        EventOutcome out;
        out.t = e.t;
        out.type = e.type;
        out.agent = e.agent;

        if (e.type == "move_to") {
            Agent& a = agents.at(e.agent);
            GeodeticPosition from = a.position_at(e.t);
            // a new command overrides any in-progress motion
            std::erase_if(a.knots, [&](const TrajectoryKnot& k) { return k.t > e.t; });
            a.knots.push_back({e.t, from});
            a.knots.push_back({e.t + std::max(e.duration_s, 0.0), *e.position});
            out.detail = "moving";
        } else if (e.type == "hover") {
            out.detail = "hovering";
        } else if (e.type == "stare_at") {
            Agent& a = agents.at(e.agent);
            std::optional<GeodeticPosition> coords;
            if (e.source == "fixed") coords = e.target;
            else if (e.source == "received") coords = a.last_received;
            else if (e.source == "own_geolocation") coords = a.last_geolocation;
            else throw ValidationError("scenario: unknown stare source " + e.source);
            if (!coords) {
                out.ok = false;
                out.detail = "no coordinates available; heading unchanged";
            } else {
                auto cmd = optics::stare_solution(a.position_at(e.t), *coords);
                if (cmd.reachable) {
                    a.yaw_deg = cmd.vehicle_yaw_deg;
                    a.pitch_deg = cmd.gimbal_pitch_deg;
                    a.roll_deg = cmd.gimbal_roll_deg;
                    char buf[80];
                    std::snprintf(buf, sizeof(buf), "yaw=%.3f pitch=%.3f", cmd.vehicle_yaw_deg,
                                  cmd.gimbal_pitch_deg);
                    out.detail = buf;
                } else {
                    out.ok = false;
                    out.detail = "stare unreachable; heading unchanged";
                }
            }
        } else if (e.type == "detect_at_pixel") {
            Agent& a = agents.at(e.agent);
            double px, py;
            if (e.bbox) {
                px = 0.5 * ((*e.bbox)[0] + (*e.bbox)[2]);
                py = 0.5 * ((*e.bbox)[1] + (*e.bbox)[3]);
            } else {
                px = e.pixel->first;
                py = e.pixel->second;
            }
            // timing: the frame is taken now but the state lookup lags by the
            // agent's latency
            geolocate::VehicleState st;
            st.position = a.position_at(e.t - a.noise.latency_s);
            st.attitude = optics::GimbalState::from_euler(a.yaw_deg, a.pitch_deg, a.roll_deg);
            st.timestamp_s = e.t;
            int trial = a.trial_counter++;
            st = uncertainty::perturb_state(st, a.noise, trial);
            auto [jx, jy] = uncertainty::perturb_pixel(a.spec.camera, px, py, a.noise, trial);
            auto res = geolocate::geolocate_pixel(grid, st, a.spec.camera, jx, jy);
            if (res.status == GeoStatus::HIT) {
                a.last_geolocation = res.hit;
                char buf[120];
                std::snprintf(buf, sizeof(buf), "hit %.8f,%.8f,%.3f", res.hit.latitude_deg,
                              res.hit.longitude_deg, res.hit.altitude_m);
                out.detail = buf;
            } else {
                out.ok = false;
                out.detail = "miss: " + geolocate::status_name(res.status);
            }
        } else if (e.type == "publish_geolocation") {
            Agent& a = agents.at(e.agent);
            if (!a.last_geolocation) {
                out.ok = false;
                out.detail = "nothing to publish";
            } else {
                ++rep.bus.sent;
                double u = uniform01(bus_rng);
                double jitter = s.bus.latency_jitter_s > 0
                                    ? s.bus.latency_jitter_s * (2.0 * uniform01(bus_rng) - 1.0)
                                    : 0.0;
                if (u < s.bus.drop_probability) {
                    ++rep.bus.dropped;
                    out.detail = "dropped";
                } else {
                    double latency = e.latency_override_s
                                         ? *e.latency_override_s
                                         : std::max(0.0, s.bus.latency_mean_s + jitter);
                    deliveries.push({e.t + latency, next_seq++, e.agent, *a.last_geolocation, e.t});
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), "sent, latency %.4f s", latency);
                    out.detail = buf;
                }
            }
        } else if (e.type == "assert") {
            AssertionOutcome ao;
            ao.t = e.t;
            ao.kind = e.assert_kind;
            ao.agent = e.agent;
            if (e.assert_kind == "yaw_to_target") {
                const Agent& a = agents.at(e.agent);
                auto cmd = optics::stare_solution(a.position_at(e.t), *e.target);
                ao.expected = cmd.vehicle_yaw_deg;
                ao.measured = a.yaw_deg;
                ao.tolerance = e.tol_deg;
                ao.pass = std::abs(wrap_deg180(ao.measured - ao.expected)) <= e.tol_deg;
            } else if (e.assert_kind == "yaw_equals") {
                const Agent& a = agents.at(e.agent);
                ao.expected = e.value_deg;
                ao.measured = a.yaw_deg;
                ao.tolerance = e.tol_deg;
                ao.pass = std::abs(wrap_deg180(ao.measured - ao.expected)) <= e.tol_deg;
            } else if (e.assert_kind == "received_within") {
                const Agent& a = agents.at(e.agent);
                ao.tolerance = e.tol_m;
                if (!a.last_received) {
                    ao.pass = false;
                    ao.detail = "nothing received";
                } else {
                    ao.measured = geodesy::haversine_m(*a.last_received, *e.target);
                    ao.pass = ao.measured <= e.tol_m;
                }
            } else if (e.assert_kind == "bus_conservation") {
                int in_flight = static_cast<int>(deliveries.size());
                ao.measured = rep.bus.delivered + rep.bus.dropped + in_flight;
                ao.expected = rep.bus.sent;
                ao.pass = ao.measured == ao.expected;
            } else if (e.assert_kind == "delivered_range") {
                ao.measured = rep.bus.delivered;
                ao.pass = rep.bus.delivered >= e.min_count && rep.bus.delivered <= e.max_count;
                char buf[64];
                std::snprintf(buf, sizeof(buf), "expected [%d, %d]", e.min_count, e.max_count);
                ao.detail = buf;
            }
            rep.assertions.push_back(ao);
            out.ok = ao.pass;
            out.detail = e.assert_kind + (ao.pass ? ": pass" : ": FAIL");
        }
        rep.events.push_back(std::move(out));
    }

    deliver_due(end_time, std::numeric_limits<long>::max());
    rep.bus.in_flight = static_cast<int>(deliveries.size());
    if (rep.bus.delivered > 0) rep.bus.mean_latency_s = latency_sum / rep.bus.delivered;

    // conservation is checked on every run, scripted or not
    AssertionOutcome conserve;
    conserve.t = end_time;
    conserve.kind = "bus_conservation";
    conserve.measured = rep.bus.delivered + rep.bus.dropped + rep.bus.in_flight;
    conserve.expected = rep.bus.sent;
    conserve.pass = conserve.measured == conserve.expected;
    conserve.detail = "auto";
    rep.assertions.push_back(conserve);

    for (const auto& [id, a] : agents) {
        AgentFinal f;
        f.id = id;
        f.position = a.position_at(end_time);
        f.yaw_deg = a.yaw_deg;
        f.pitch_deg = a.pitch_deg;
        f.last_geolocation = a.last_geolocation;
        f.last_received = a.last_received;
        rep.agents.push_back(std::move(f));
    }

    rep.passed = std::all_of(rep.assertions.begin(), rep.assertions.end(),
                             [](const AssertionOutcome& a) { return a.pass; });
    return rep;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

json position_json(const GeodeticPosition& p) {
    return {p.latitude_deg, p.longitude_deg, p.altitude_m, geodesy::datum_name(p.datum)};
}

} // namespace

std::string ScenarioReport::to_json() const {
    json j;
    json evs = json::array();
    for (const EventOutcome& e : events)
        evs.push_back({{"t", e.t}, {"type", e.type}, {"agent", e.agent}, {"ok", e.ok},
                       {"detail", e.detail}});
    j["events"] = std::move(evs);
    json as = json::array();
    for (const AssertionOutcome& a : assertions)
        as.push_back({{"t", a.t},
                      {"kind", a.kind},
                      {"agent", a.agent},
                      {"pass", a.pass},
                      {"measured", a.measured},
                      {"expected", a.expected},
                      {"tolerance", a.tolerance},
                      {"detail", a.detail}});
    j["assertions"] = std::move(as);
    j["bus"] = {{"sent", bus.sent},
                {"delivered", bus.delivered},
                {"dropped", bus.dropped},
                {"in_flight", bus.in_flight},
                {"mean_latency_s", bus.mean_latency_s}};
    json ags = json::array();
    for (const AgentFinal& a : agents) {
        json aj;
        aj["id"] = a.id;
        aj["position"] = position_json(a.position);
        aj["yaw_deg"] = a.yaw_deg;
        aj["pitch_deg"] = a.pitch_deg;
        if (a.last_geolocation) aj["last_geolocation"] = position_json(*a.last_geolocation);
        if (a.last_received) aj["last_received"] = position_json(*a.last_received);
        ags.push_back(std::move(aj));
    }
    j["agents"] = std::move(ags);
    j["tag"] = {{"level", level_name(tag.level)},
                {"fidelity", fidelity_name(tag.fidelity)},
                {"complexity", complexity_name(tag.complexity)},
                {"challenges", tag.challenges}};
    j["passed"] = passed;
    return j.dump(1);
}

std::string ScenarioReport::events_csv() const {
    std::string out = "t,type,agent,ok,detail\n";
    char buf[64];
    for (const EventOutcome& e : events) {
        std::snprintf(buf, sizeof(buf), "%.17g,", e.t);
        out += buf;
        out += e.type + "," + e.agent + "," + (e.ok ? "true" : "false") + ",\"" + e.detail +
               "\"\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario file I/O

namespace {

GeodeticPosition position_from_json(const json& j) {
    if (!j.is_array() || j.size() < 3)
        throw ValidationError("position must be [lat, lon, alt(, datum)]");
    geodesy::Datum d = j.size() > 3 ? geodesy::datum_from_name(j[3].get<std::string>())
                                    : geodesy::Datum::ELLIPSOID_WGS84;
    return GeodeticPosition(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), d);
}

} // namespace

Scenario scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("malformed scenario file " + path + ": " + e.what());
    }
    try {
        int version = j.at("version").get<int>();
        if (version != 1)
            throw ValidationError("unsupported scenario version: " + std::to_string(version));
        Scenario s;
        s.seed = j.value("seed", std::uint64_t{1729});
        if (j.contains("terrain")) {
            const json& t = j["terrain"];
            if (t.contains("path")) {
                s.grid_path = t["path"].get<std::string>();
            } else {
                terrain::SynthParams p;
                p.lat_min = t.value("lat_min", p.lat_min);
                p.lat_max = t.value("lat_max", p.lat_max);
                p.lon_min = t.value("lon_min", p.lon_min);
                p.lon_max = t.value("lon_max", p.lon_max);
                p.cell_dlat = t.value("cell_dlat", p.cell_dlat);
                p.cell_dlon = t.value("cell_dlon", p.cell_dlon);
                p.base_elevation_m = t.value("base_elevation_m", p.base_elevation_m);
                p.ripple_m = t.value("ripple_m", p.ripple_m);
                p.depth_m = t.value("depth_m", p.depth_m);
                p.rise_m = t.value("rise_m", p.rise_m);
                if (t.contains("datum"))
                    p.datum = geodesy::datum_from_name(t["datum"].get<std::string>());
                s.synth = {terrain::synth_kind_from_name(t.value("kind", std::string("flat"))), p};
            }
        }
        if (j.contains("bus")) {
            s.bus.latency_mean_s = j["bus"].value("latency_mean_s", 0.05);
            s.bus.latency_jitter_s = j["bus"].value("latency_jitter_s", 0.0);
            s.bus.drop_probability = j["bus"].value("drop_probability", 0.0);
        }
        for (const auto& aj : j.at("agents")) {
            AgentSpec a;
            a.id = aj.at("id").get<std::string>();
            a.position = position_from_json(aj.at("position"));
            a.yaw_deg = aj.value("yaw_deg", 0.0);
            a.pitch_deg = aj.value("pitch_deg", 0.0);
            a.roll_deg = aj.value("roll_deg", 0.0);
            if (aj.contains("camera"))
                a.camera = optics::CameraModel(aj["camera"].value("fov_h_deg", 74.0),
                                               aj["camera"].value("width_px", 1920),
                                               aj["camera"].value("height_px", 1080));
            if (aj.contains("noise")) {
                const json& nj = aj["noise"];
                a.noise.gps_sigma_h_m = nj.value("gps_sigma_h_m", 0.0);
                a.noise.gps_sigma_v_m = nj.value("gps_sigma_v_m", 0.0);
                a.noise.altitude_bias_m = nj.value("altitude_bias_m", 0.0);
                a.noise.attitude_sigma_deg = nj.value("attitude_sigma_deg", 0.0);
                a.noise.pixel_sigma_px = nj.value("pixel_sigma_px", 0.0);
                a.noise.hdop_scale = nj.value("hdop_scale", 1.0);
                a.noise.latency_s = nj.value("latency_s", 0.0);
                a.noise.seed = nj.value("seed", std::uint64_t{0});
                a.noise.validate();
            }
            s.agents.push_back(std::move(a));
        }
        for (const auto& ej : j.at("script")) {
            ScriptEvent e;
            e.t = ej.at("t").get<double>();
            e.type = ej.at("type").get<std::string>();
            e.agent = ej.value("agent", std::string{});
            if (ej.contains("position")) e.position = position_from_json(ej["position"]);
            e.duration_s = ej.value("duration_s", 0.0);
            e.source = ej.value("source", std::string("fixed"));
            if (ej.contains("target")) e.target = position_from_json(ej["target"]);
            if (ej.contains("pixel"))
                e.pixel = {{ej["pixel"][0].get<double>(), ej["pixel"][1].get<double>()}};
            if (ej.contains("bbox"))
                e.bbox = {{ej["bbox"][0].get<double>(), ej["bbox"][1].get<double>(),
                           ej["bbox"][2].get<double>(), ej["bbox"][3].get<double>()}};
            if (ej.contains("latency_s")) e.latency_override_s = ej["latency_s"].get<double>();
            e.assert_kind = ej.value("kind", std::string{});
            e.tol_deg = ej.value("tol_deg", 0.5);
            e.tol_m = ej.value("tol_m", 1.0);
            e.value_deg = ej.value("value_deg", 0.0);
            e.min_count = ej.value("min_count", 0);
            e.max_count = ej.value("max_count", 0);
            s.script.push_back(std::move(e));
        }
        if (j.contains("tag")) {
            const json& tj = j["tag"];
            s.tag.level = level_from_name(tj.value("level", std::string("SYSTEM")));
            s.tag.fidelity = fidelity_from_name(tj.value("fidelity", std::string("SIL")));
            s.tag.complexity = complexity_from_name(tj.value("complexity", std::string("SIMPLE")));
            if (tj.contains("challenges"))
                for (const auto& c : tj["challenges"]) s.tag.challenges.insert(c.get<int>());
            s.tag.validate_scenario_tag();
        }
        validate_scenario(s);
        return s;
    } catch (const json::exception& e) {
        throw ParseError("invalid scenario file " + path + ": " + e.what());
    }
}

void scenario_to_json_file(const Scenario& s, const std::string& path) {
    json j;
    j["version"] = 1;
    j["seed"] = s.seed;
    if (s.grid_path) {
        j["terrain"] = {{"path", *s.grid_path}};
    } else if (s.synth) {
        const auto& [kind, p] = *s.synth;
        j["terrain"] = {{"kind", terrain::synth_kind_name(kind)},
                        {"lat_min", p.lat_min},
                        {"lat_max", p.lat_max},
                        {"lon_min", p.lon_min},
                        {"lon_max", p.lon_max},
                        {"cell_dlat", p.cell_dlat},
                        {"cell_dlon", p.cell_dlon},
                        {"base_elevation_m", p.base_elevation_m},
                        {"ripple_m", p.ripple_m},
                        {"depth_m", p.depth_m},
                        {"rise_m", p.rise_m},
                        {"datum", geodesy::datum_name(p.datum)}};
    }
    j["bus"] = {{"latency_mean_s", s.bus.latency_mean_s},
                {"latency_jitter_s", s.bus.latency_jitter_s},
                {"drop_probability", s.bus.drop_probability}};
    json ags = json::array();
    for (const AgentSpec& a : s.agents) {
        json aj;
        aj["id"] = a.id;
        aj["position"] = position_json(a.position);
        aj["yaw_deg"] = a.yaw_deg;
        aj["pitch_deg"] = a.pitch_deg;
        aj["roll_deg"] = a.roll_deg;
        aj["camera"] = {{"fov_h_deg", a.camera.fov_h_deg},
                        {"width_px", a.camera.width_px},
                        {"height_px", a.camera.height_px}};
        aj["noise"] = {{"gps_sigma_h_m", a.noise.gps_sigma_h_m},
                       {"gps_sigma_v_m", a.noise.gps_sigma_v_m},
                       {"altitude_bias_m", a.noise.altitude_bias_m},
                       {"attitude_sigma_deg", a.noise.attitude_sigma_deg},
                       {"pixel_sigma_px", a.noise.pixel_sigma_px},
                       {"hdop_scale", a.noise.hdop_scale},
                       {"latency_s", a.noise.latency_s},
                       {"seed", a.noise.seed}};
        ags.push_back(std::move(aj));
    }
    j["agents"] = std::move(ags);
    json script = json::array();
    for (const ScriptEvent& e : s.script) {
        json ej;
        ej["t"] = e.t;
        ej["type"] = e.type;
        if (!e.agent.empty()) ej["agent"] = e.agent;
        if (e.position) ej["position"] = position_json(*e.position);
        if (e.duration_s != 0) ej["duration_s"] = e.duration_s;
        if (e.type == "stare_at") ej["source"] = e.source;
        if (e.target) ej["target"] = position_json(*e.target);
        if (e.pixel) ej["pixel"] = {e.pixel->first, e.pixel->second};
        if (e.bbox) ej["bbox"] = *e.bbox;
        if (e.latency_override_s) ej["latency_s"] = *e.latency_override_s;
        if (e.type == "assert") {
            ej["kind"] = e.assert_kind;
            ej["tol_deg"] = e.tol_deg;
            ej["tol_m"] = e.tol_m;
            ej["value_deg"] = e.value_deg;
            ej["min_count"] = e.min_count;
            ej["max_count"] = e.max_count;
        }
        script.push_back(std::move(ej));
    }
    j["script"] = std::move(script);
    j["tag"] = {{"level", level_name(s.tag.level)},
                {"fidelity", fidelity_name(s.tag.fidelity)},
                {"complexity", complexity_name(s.tag.complexity)},
                {"challenges", s.tag.challenges}};
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
}

Scenario make_collaborative_scenario(double drop_probability, std::uint64_t seed,
                                     double latency_mean_s, double latency_jitter_s) {
    using geodesy::Datum;
    Scenario s;
    terrain::SynthParams p;
    p.ripple_m = 0;
    s.synth = {terrain::SynthKind::FLAT, p};
    s.seed = seed;
    s.bus = {latency_mean_s, latency_jitter_s, drop_probability};
    s.tag = {TestLevel::SYSTEM, Fidelity::SIL, Complexity::SIMPLE, {3, 4, 7}};

    GeodeticPosition person(36.2125, -96.0065, p.base_elevation_m, Datum::ELLIPSOID_WGS84);

    AgentSpec lime;
    lime.id = "lime";
    lime.position = GeodeticPosition(36.2120, -96.0060, p.base_elevation_m + 50.0,
                                     Datum::ELLIPSOID_WGS84);
    AgentSpec fuchsia;
    fuchsia.id = "fuchsia";
    fuchsia.position = GeodeticPosition(36.2128, -96.0058, p.base_elevation_m + 30.0,
                                        Datum::ELLIPSOID_WGS84);
    fuchsia.yaw_deg = 200.0; // initially pointing away
    s.agents = {lime, fuchsia};

    auto event = [](double t, const std::string& type, const std::string& agent) {
        ScriptEvent e;
        e.t = t;
        e.type = type;
        e.agent = agent;
        return e;
    };
    ScriptEvent stare1 = event(0, "stare_at", "lime");
    stare1.source = "fixed";
    stare1.target = person;
    ScriptEvent detect = event(1, "detect_at_pixel", "lime");
    detect.pixel = {{960.0, 540.0}};
    ScriptEvent pub = event(2, "publish_geolocation", "lime");
    ScriptEvent stare2 = event(5, "stare_at", "fuchsia");
    stare2.source = "received";
    ScriptEvent a1 = event(6, "assert", "lime");
    a1.assert_kind = "yaw_to_target";
    a1.target = person;
    a1.tol_deg = 0.5;
    ScriptEvent a2 = event(6, "assert", "fuchsia");
    a2.target = person;
    a2.tol_deg = 0.5;
    if (drop_probability >= 1.0) {
        a2.assert_kind = "yaw_equals"; // never reoriented
        a2.value_deg = fuchsia.yaw_deg;
    } else {
        a2.assert_kind = "yaw_to_target";
    }
    ScriptEvent a3 = event(6, "assert", "");
    a3.assert_kind = "bus_conservation";
    s.script = {stare1, detect, pub, stare2, a1, a2, a3};
    return s;
}

} // namespace tds::harness
