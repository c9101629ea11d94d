#pragma once

#include "pbqc/decoy.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

namespace pbqc::st {

// Positions on a line, units where the signal speed is 1.
struct Geometry {
    double v0 = -1.0;
    double e0 = -0.5;
    double p = 0.0;
    double e1 = 0.5;
    double v1 = 1.0;
    bool has_adversaries = false;

    void validate() const;
};

enum class ScenarioType {
    HonestSinglePhoton,
    HonestWcp,
    AdversaryLattice,
    AdversaryBb84,
    AdversaryWcp,
    AdversaryWait, // E0 stores the state until the basis relay arrives, then
                   // forwards it to E1, who measures and reports to both
};

struct Scenario {
    ScenarioType type = ScenarioType::HonestSinglePhoton;
    Geometry geometry;
    decoy::ChannelModel channel;
    double mu = 0.12;    // WCP scenarios
    int lattice_n = 4;   // lattice adversary
    int m0 = 0;

    void validate() const;
};

struct Report {
    int bit = 0;
    double emit_time = 0.0;
    double arrival_time = 0.0;
};

struct RoundOutcome {
    std::optional<Report> report_v0;
    std::optional<Report> report_v1;
    int truth_bit = 0;
    double challenge_emit_v0 = 0.0; // quantum-state emission time at V0
    double challenge_emit_v1 = 0.0; // basis emission time at V1
};

RoundOutcome run_round(const Scenario& scenario, std::mt19937_64& rng);

// True iff each present report arrived within `tolerance` of
// challenge_emit + 2*d(verifier, claimed_position).
bool verify_timing(const RoundOutcome& outcome, const Geometry& geometry,
                   double claimed_position, double tolerance);

// Both reports absent, or both present with equal bits.
bool cross_check(const RoundOutcome& outcome);

struct AcceptanceConfig {
    double z = 5.0;                 // reporting-rate confidence band width
    double qber_budget = 0.0;
    double expected_rate = 0.0;     // honest expectation for the band test
    double timing_tolerance = 0.0;
    double claimed_position = 0.0;
};

struct SessionStats {
    std::uint64_t n_rounds = 0;
    std::uint64_t n_reported = 0;
    std::uint64_t n_errors = 0;
    double reporting_rate = 0.0;
    double qber = 0.0;
    double timing_ok = 0.0;      // fraction of rounds passing the timing check
    double consistency_ok = 0.0; // fraction of rounds passing the cross-check
    bool accept = false;
};

SessionStats run_session(const Scenario& scenario, std::uint64_t n_rounds,
                         const AcceptanceConfig& acceptance, std::uint64_t seed,
                         const std::function<void(std::uint64_t, const RoundOutcome&)>&
                             on_round = {});

// Honest expectation (rate, qber) for a scenario's source and channel.
std::pair<double, double> honest_expectation(const Scenario& scenario);

struct SessionConfig {
    Scenario scenario;
    std::uint64_t rounds = 0;
    std::uint64_t seed = 0;
    AcceptanceConfig acceptance;
};

// Parses the scenario-config JSON schema; throws std::invalid_argument with
// the offending key on malformed input.
SessionConfig session_config_from_json(const nlohmann::json& j);

nlohmann::json stats_to_json(const SessionStats& stats);

} // namespace pbqc::st
