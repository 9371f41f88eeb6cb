#pragma once

#include "tds/taxonomy.hpp"
#include "tds/terrain.hpp"
#include "tds/uncertainty.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tds::harness {

using geodesy::GeodeticPosition;

/// Simulated message bus: fixed mean latency plus uniform jitter and
/// Bernoulli drops. Parameters are per scenario and deliberately simple —
/// enough to reproduce latency-induced loss and reordering.
struct BusConfig {
    double latency_mean_s = 0.05;
    double latency_jitter_s = 0.0; // uniform in [-jitter, +jitter]
    double drop_probability = 0.0;
};

struct AgentSpec {
    std::string id;
    GeodeticPosition position;
    double yaw_deg = 0, pitch_deg = 0, roll_deg = 0;
    optics::CameraModel camera;
    uncertainty::NoiseModel noise;
};

/// One scripted step. `type` selects which fields apply:
///   move_to:             agent, position, duration_s
///   hover:               agent, duration_s
///   stare_at:            agent, source (fixed|received|own_geolocation), target
///   detect_at_pixel:     agent, pixel or bbox
///   publish_geolocation: agent, optional latency_override_s
///   assert:              kind + fields below
/// assert kinds:
///   yaw_to_target   (agent, target, tol_deg)  final yaw vs bearing to target
///   yaw_equals      (agent, value_deg, tol_deg)
///   received_within (agent, target, tol_m)
///   bus_conservation
///   delivered_range (min_count, max_count)
struct ScriptEvent {
    double t = 0;
    std::string type;
    std::string agent;

    std::optional<GeodeticPosition> position;
    double duration_s = 0;
    std::string source = "fixed";
    std::optional<GeodeticPosition> target;
    std::optional<std::pair<double, double>> pixel;
    std::optional<std::array<double, 4>> bbox;
    std::optional<double> latency_override_s;

    std::string assert_kind;
    double tol_deg = 0.5;
    double tol_m = 1.0;
    double value_deg = 0;
    int min_count = 0, max_count = 0;
};

struct Scenario {
    std::optional<std::string> grid_path;
    std::optional<std::pair<terrain::SynthKind, terrain::SynthParams>> synth;
    std::vector<AgentSpec> agents;
    BusConfig bus;
    std::uint64_t seed = 1729;
    std::vector<ScriptEvent> script;
    TestTag tag;
};

struct EventOutcome {
    double t = 0;
    std::string type;
    std::string agent;
    bool ok = true;
    std::string detail;
};

struct AssertionOutcome {
    double t = 0;
    std::string kind;
    std::string agent;
    bool pass = false;
    double measured = 0;
    double expected = 0;
    double tolerance = 0;
    std::string detail;
};

struct BusStats {
    int sent = 0;
    int delivered = 0;
    int dropped = 0;
    int in_flight = 0;
    double mean_latency_s = 0; // over delivered messages
};

struct AgentFinal {
    std::string id;
    GeodeticPosition position;
    double yaw_deg = 0, pitch_deg = 0;
    std::optional<GeodeticPosition> last_geolocation;
    std::optional<GeodeticPosition> last_received;
};

struct ScenarioReport {
    std::vector<EventOutcome> events;
    std::vector<AssertionOutcome> assertions;
    BusStats bus;
    std::vector<AgentFinal> agents;
    TestTag tag;
    bool passed = false;

    std::string to_json() const;
    std::string events_csv() const;
};

/// Deterministic single-threaded discrete-event execution; all randomness
/// derives from the scenario seed. Message receipt is latest-send-time-wins,
/// so jitter-induced reordering cannot regress an agent's knowledge.
ScenarioReport run_scenario(const Scenario& s);

Scenario scenario_from_json_file(const std::string& path);
void scenario_to_json_file(const Scenario& s, const std::string& path);

/// Two agents over flat terrain: agent "lime" stares at a person, detects it
/// at the frame center, geolocates and publishes; agent "fuchsia" receives
/// and turns toward the received coordinates. Asserts both final headings
/// against the true bearing. Latency/drop defaults are placeholders, not
/// field-calibrated.
Scenario make_collaborative_scenario(double drop_probability, std::uint64_t seed,
                                     double latency_mean_s = 0.05,
                                     double latency_jitter_s = 0.0);

} // namespace tds::harness
