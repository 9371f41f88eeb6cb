#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace tds::harness {

/// Test taxonomy coordinates: level (unit .. acceptance), operational
/// fidelity (software-in-the-loop, hardware-in-the-loop, real world), and
/// scenario complexity. Only SIL executes in this library; HIL/REAL tags
/// label imported results. `challenges` lists the operational challenge ids
/// (1..8) a test probes:
///   C1 sub-resolution terrain obstacles     C5 gimbal sensing accuracy
///   C2 inconsistent distance to ground      C6 visual detection uncertainty
///   C3 object geolocation accuracy          C7 resource/timing constraints
///   C4 GPS inaccuracy                       C8 operator situational awareness
enum class TestLevel { UNIT, INTEGRATION, SYSTEM, ACCEPTANCE };
enum class Fidelity { SIL, HIL, REAL };
enum class Complexity { SIMPLE, MODERATE, EDGE };

std::string level_name(TestLevel l);
std::string fidelity_name(Fidelity f);
std::string complexity_name(Complexity c);
TestLevel level_from_name(const std::string& s);
Fidelity fidelity_from_name(const std::string& s);
Complexity complexity_from_name(const std::string& s);

struct TestTag {
    TestLevel level = TestLevel::UNIT;
    Fidelity fidelity = Fidelity::SIL;
    Complexity complexity = Complexity::SIMPLE;
    std::set<int> challenges; // subset of 1..8

    void validate_scenario_tag() const; // scenario-level tags need challenges
};

struct TaggedResult {
    std::string name;
    TestTag tag;
    bool passed = false;
};

/// Coverage matrix over level x fidelity x complexity plus per-challenge
/// coverage (covered = at least one passing test carries the id).
struct TaxonomyReport {
    struct Cell {
        int total = 0;
        int passed = 0;
    };
    Cell matrix[4][3][3]; // [level][fidelity][complexity]
    std::array<bool, 8> challenge_covered{}; // index 0 -> C1
    int total = 0;
    int total_passed = 0;
};

TaxonomyReport taxonomy_report(const std::vector<TaggedResult>& results);

std::string taxonomy_to_json(const TaxonomyReport& report);
std::string taxonomy_to_table(const TaxonomyReport& report);

/// Parses externally produced results: JSON array of
/// {"name", "level", "fidelity", "complexity", "challenges":[ints], "passed"}.
std::vector<TaggedResult> results_from_json_file(const std::string& path);

/// Fast self-contained checks exercising challenges C1..C7 across the
/// library; C8 (operator awareness) has no executable scenario and stays
/// uncovered by construction.
std::vector<TaggedResult> builtin_suite();

} // namespace tds::harness
