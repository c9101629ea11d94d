#include "pbqc/spacetime.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

namespace pbqc::st {

namespace {

double dist(double a, double b) { return std::abs(a - b); }

// Message deliveries at light speed, processed in (arrival, insertion) order.
class EventQueue {
  public:
    using Handler = std::function<void(double arrival_time)>;

    void send(double emit_time, double from_pos, double to_pos, Handler handler) {
        events_.push(Event{emit_time + dist(from_pos, to_pos), seq_++, std::move(handler)});
    }

    void run() {
        while (!events_.empty()) {
            Event ev = events_.top();
            events_.pop();
            if (ev.time < last_time_) throw std::logic_error("causality violation");
            last_time_ = ev.time;
            ev.handler(ev.time);
        }
    }

  private:
    struct Event {
        double time;
        long seq;
        Handler handler;
        bool operator>(const Event& other) const {
            return time != other.time ? time > other.time : seq > other.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    long seq_ = 0;
    double last_time_ = 0.0;
};

struct LatticeDraw {
    int ring = 0;       // m
    double theta = 0.0; // theta_m
};

// Uniform pixel over the N-ring lattice; only the ring matters for the
// pole-aligned adversary.
LatticeDraw draw_lattice_pixel(int n_rings, std::mt19937_64& rng) {
    constexpr double pi = std::numbers::pi;
    std::vector<int> sizes(n_rings + 1);
    int k = 0;
    for (int m = 0; m <= n_rings; ++m) {
        sizes[m] = 1 + static_cast<int>(std::floor(2.0 * n_rings * std::sin(m * pi / n_rings)));
        k += sizes[m];
    }
    int idx = std::uniform_int_distribution<int>(0, k - 1)(rng);
    int m = 0;
    while (idx >= sizes[m]) idx -= sizes[m++];
    return LatticeDraw{m, m * pi / n_rings};
}

enum class LatticeAction { Report, Flip, Silent };

LatticeAction lattice_action(int m, int m0, int n_rings) {
    if (2 * m0 == n_rings) {
        // Equator ring belongs to the report set.
        return m <= m0 ? LatticeAction::Report : LatticeAction::Flip;
    }
    if (m <= m0) return LatticeAction::Report;
    if (m >= n_rings - m0) return LatticeAction::Flip;
    return LatticeAction::Silent;
}

struct RoundDecision {
    bool reports = false;
    int bit = 0;
};

// Samples the adversaries' shared decision for one intercepted single photon.
RoundDecision lattice_attack_decision(int truth_bit, int n_rings, int m0,
                                      std::mt19937_64& rng) {
    const LatticeDraw pixel = draw_lattice_pixel(n_rings, rng);
    const LatticeAction action = lattice_action(pixel.ring, m0, n_rings);
    if (action == LatticeAction::Silent) return RoundDecision{};
    const double s = std::sin(pixel.theta / 2.0);
    const bool outcome_wrong =
        std::bernoulli_distribution(s * s)(rng); // pole-aligned measurement
    int bit = outcome_wrong ? 1 - truth_bit : truth_bit;
    if (action == LatticeAction::Flip) bit = 1 - bit;
    return RoundDecision{true, bit};
}

} // namespace

void Geometry::validate() const {
    const bool honest_ok = v0 < p && p < v1;
    const bool adversary_ok = v0 < e0 && e0 < p && p < e1 && e1 < v1;
    if (!honest_ok || (has_adversaries && !adversary_ok)) {
        throw std::invalid_argument("actors must satisfy V0 < E0 < P < E1 < V1");
    }
}

void Scenario::validate() const {
    Geometry g = geometry;
    g.has_adversaries = type != ScenarioType::HonestSinglePhoton &&
                        type != ScenarioType::HonestWcp;
    g.validate();
    channel.validate();
    if (type == ScenarioType::HonestWcp || type == ScenarioType::AdversaryWcp) {
        if (!(mu > 0.0)) throw std::invalid_argument("wcp scenario requires mu > 0");
    }
    if (type == ScenarioType::AdversaryLattice || type == ScenarioType::AdversaryWcp) {
        if (lattice_n < 1) throw std::invalid_argument("lattice requires N >= 1");
        if (m0 < 0 || 2 * m0 > lattice_n) {
            throw std::invalid_argument("m0 must lie in [0, N/2]");
        }
    }
}

RoundOutcome run_round(const Scenario& scenario, std::mt19937_64& rng) {
    scenario.validate();
    const Geometry& g = scenario.geometry;
    const double d_v0p = dist(g.v0, g.p);
    const double d_v1p = dist(g.v1, g.p);
    const double t_arrive = std::max(d_v0p, d_v1p); // challenge rendezvous at P

    RoundOutcome outcome;
    outcome.truth_bit = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
    outcome.challenge_emit_v0 = t_arrive - d_v0p;
    outcome.challenge_emit_v1 = t_arrive - d_v1p;

    EventQueue queue;
    const auto report_to_v0 = [&](double emit, double from, int bit) {
        queue.send(emit, from, g.v0, [&outcome, emit, bit](double arrival) {
            outcome.report_v0 = Report{bit, emit, arrival};
        });
    };
    const auto report_to_v1 = [&](double emit, double from, int bit) {
        queue.send(emit, from, g.v1, [&outcome, emit, bit](double arrival) {
            outcome.report_v1 = Report{bit, emit, arrival};
        });
    };

    switch (scenario.type) {
    case ScenarioType::HonestSinglePhoton:
    case ScenarioType::HonestWcp: {
        // The basis and state arrive together; model detection at P directly.
        const double signal_prob =
            scenario.type == ScenarioType::HonestSinglePhoton
                ? scenario.channel.eta
                : 1.0 - std::exp(-scenario.channel.eta * scenario.mu);
        queue.send(outcome.challenge_emit_v0, g.v0, g.p, [&, signal_prob](double now) {
            const bool signal = std::bernoulli_distribution(signal_prob)(rng);
            const bool dark = std::bernoulli_distribution(scenario.channel.y0)(rng);
            if (!signal && !dark) return;
            const double err_prob = signal ? scenario.channel.e_det : 0.5;
            const bool wrong = std::bernoulli_distribution(err_prob)(rng);
            const int bit = wrong ? 1 - outcome.truth_bit : outcome.truth_bit;
            report_to_v0(now, g.p, bit);
            report_to_v1(now, g.p, bit);
        });
        break;
    }
    case ScenarioType::AdversaryBb84:
    case ScenarioType::AdversaryLattice:
    case ScenarioType::AdversaryWcp: {
        // Shared decision; both adversaries derive the same bit and action
        // from (x_E, basis), so only the timing chain is event-driven.
        RoundDecision decision;
        if (scenario.type == ScenarioType::AdversaryBb84) {
            const bool guessed_basis = std::bernoulli_distribution(0.5)(rng);
            if (guessed_basis) decision = RoundDecision{true, outcome.truth_bit};
        } else if (scenario.type == ScenarioType::AdversaryLattice) {
            decision = lattice_attack_decision(outcome.truth_bit, scenario.lattice_n,
                                               scenario.m0, rng);
        } else {
            const int n_photons = std::poisson_distribution<int>(scenario.mu)(rng);
            if (n_photons == 1) {
                decision = lattice_attack_decision(outcome.truth_bit, scenario.lattice_n,
                                                   scenario.m0, rng);
            } else if (n_photons > 1) {
                decision = RoundDecision{true, outcome.truth_bit};
            }
        }
        // State intercepted at E0; outcome x_E forwarded to E1.
        queue.send(outcome.challenge_emit_v0, g.v0, g.e0, [&, decision](double now) {
            queue.send(now, g.e0, g.e1, [&, decision](double xe_arrival) {
                // E1 already holds the basis; they report once x_E arrives.
                if (decision.reports) report_to_v1(xe_arrival, g.e1, decision.bit);
            });
        });
        // Basis intercepted at E1 and relayed to E0.
        queue.send(outcome.challenge_emit_v1, g.v1, g.e1, [&, decision](double now) {
            queue.send(now, g.e1, g.e0, [&, decision](double basis_arrival) {
                if (decision.reports) report_to_v0(basis_arrival, g.e0, decision.bit);
            });
        });
        break;
    }
    case ScenarioType::AdversaryWait: {
        // E0 stores the state until the relayed basis arrives, then forwards
        // state and basis to E1, who measures in the correct basis.
        queue.send(outcome.challenge_emit_v1, g.v1, g.e1, [&](double now) {
            queue.send(now, g.e1, g.e0, [&](double basis_at_e0) {
                queue.send(basis_at_e0, g.e0, g.e1, [&](double state_at_e1) {
                    report_to_v0(state_at_e1, g.e1, outcome.truth_bit);
                    report_to_v1(state_at_e1, g.e1, outcome.truth_bit);
                });
            });
        });
        break;
    }
    }
    queue.run();
    return outcome;
}

bool verify_timing(const RoundOutcome& outcome, const Geometry& geometry,
                   double claimed_position, double tolerance) {
    if (tolerance < 0.0) throw std::invalid_argument("tolerance must be >= 0");
    const auto on_time = [&](const std::optional<Report>& report, double verifier_pos,
                             double challenge_emit) {
        if (!report) return true;
        const double expected =
            challenge_emit + 2.0 * dist(verifier_pos, claimed_position);
        return std::abs(report->arrival_time - expected) <= tolerance;
    };
    return on_time(outcome.report_v0, geometry.v0, outcome.challenge_emit_v0) &&
           on_time(outcome.report_v1, geometry.v1, outcome.challenge_emit_v1);
}

bool cross_check(const RoundOutcome& outcome) {
    if (!outcome.report_v0 && !outcome.report_v1) return true;
    return outcome.report_v0 && outcome.report_v1 &&
           outcome.report_v0->bit == outcome.report_v1->bit;
}

SessionStats run_session(const Scenario& scenario, std::uint64_t n_rounds,
                         const AcceptanceConfig& acceptance, std::uint64_t seed,
                         const std::function<void(std::uint64_t, const RoundOutcome&)>&
                             on_round) {
    if (n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
    scenario.validate();
    std::mt19937_64 rng(seed);
    SessionStats stats;
    stats.n_rounds = n_rounds;
    std::uint64_t timing_ok = 0, consistency_ok = 0;
    for (std::uint64_t i = 0; i < n_rounds; ++i) {
        const RoundOutcome outcome = run_round(scenario, rng);
        if (verify_timing(outcome, scenario.geometry, acceptance.claimed_position,
                          acceptance.timing_tolerance)) {
            ++timing_ok;
        }
        if (cross_check(outcome)) ++consistency_ok;
        if (on_round) on_round(i, outcome);
        if (outcome.report_v0) {
            ++stats.n_reported;
            if (outcome.report_v0->bit != outcome.truth_bit) ++stats.n_errors;
        }
    }
    stats.reporting_rate = static_cast<double>(stats.n_reported) / n_rounds;
    stats.qber = stats.n_reported
                     ? static_cast<double>(stats.n_errors) / stats.n_reported
                     : 0.0;
    stats.timing_ok = static_cast<double>(timing_ok) / n_rounds;
    stats.consistency_ok = static_cast<double>(consistency_ok) / n_rounds;
    const double band =
        acceptance.z * std::sqrt(acceptance.expected_rate *
                                 (1.0 - acceptance.expected_rate) / n_rounds);
    stats.accept = timing_ok == n_rounds && consistency_ok == n_rounds &&
                   std::abs(stats.reporting_rate - acceptance.expected_rate) <= band &&
                   stats.qber <= acceptance.qber_budget;
    return stats;
}

std::pair<double, double> honest_expectation(const Scenario& scenario) {
    const double signal = scenario.type == ScenarioType::HonestWcp ||
                                  scenario.type == ScenarioType::AdversaryWcp
                              ? 1.0 - std::exp(-scenario.channel.eta * scenario.mu)
                              : scenario.channel.eta;
    const double y0 = scenario.channel.y0;
    const double rate = y0 + signal - y0 * signal;
    if (rate <= 0.0) return {0.0, 0.0};
    const double qber =
        (0.5 * y0 * (1.0 - signal) + scenario.channel.e_det * signal) / rate;
    return {rate, qber};
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) {
        throw std::invalid_argument(std::string("missing config key: ") + key);
    }
    return j.at(key);
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys,
                    const char* where) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) {
            throw std::invalid_argument(std::string("unknown config key: ") + where +
                                        "." + key);
        }
    }
}

} // namespace

SessionConfig session_config_from_json(const nlohmann::json& j) {
    reject_unknown(j, {"geometry", "channel", "source", "adversary", "rounds", "seed",
                       "acceptance"},
                   "config");
    SessionConfig cfg;
    Scenario& sc = cfg.scenario;

    const auto& geom = require(j, "geometry");
    reject_unknown(geom, {"v0", "e0", "p", "e1", "v1"}, "geometry");
    sc.geometry.v0 = require(geom, "v0").get<double>();
    sc.geometry.p = require(geom, "p").get<double>();
    sc.geometry.v1 = require(geom, "v1").get<double>();
    sc.geometry.e0 = geom.value("e0", 0.5 * (sc.geometry.v0 + sc.geometry.p));
    sc.geometry.e1 = geom.value("e1", 0.5 * (sc.geometry.p + sc.geometry.v1));

    const auto& chan = require(j, "channel");
    reject_unknown(chan, {"eta", "y0", "e_det"}, "channel");
    sc.channel.eta = require(chan, "eta").get<double>();
    sc.channel.y0 = chan.value("y0", 0.0);
    sc.channel.e_det = chan.value("e_det", 0.0);

    const auto& source = require(j, "source");
    reject_unknown(source, {"type", "mu"}, "source");
    const std::string source_type = require(source, "type").get<std::string>();
    bool wcp_source = false;
    if (source_type == "wcp") {
        wcp_source = true;
        sc.mu = require(source, "mu").get<double>();
    } else if (source_type != "single_photon") {
        throw std::invalid_argument("source.type must be single_photon or wcp");
    }

    if (j.contains("adversary") && !j.at("adversary").is_null()) {
        const auto& adv = j.at("adversary");
        reject_unknown(adv, {"type", "N", "m0"}, "adversary");
        const std::string adv_type = require(adv, "type").get<std::string>();
        if (adv_type == "bb84") {
            sc.type = ScenarioType::AdversaryBb84;
        } else if (adv_type == "lattice") {
            sc.type = ScenarioType::AdversaryLattice;
            sc.lattice_n = require(adv, "N").get<int>();
            sc.m0 = require(adv, "m0").get<int>();
        } else if (adv_type == "wcp") {
            sc.type = ScenarioType::AdversaryWcp;
            sc.lattice_n = require(adv, "N").get<int>();
            sc.m0 = require(adv, "m0").get<int>();
        } else if (adv_type == "wait") {
            sc.type = ScenarioType::AdversaryWait;
        } else {
            throw std::invalid_argument("adversary.type must be one of "
                                        "bb84, lattice, wcp, wait");
        }
        sc.geometry.has_adversaries = true;
    } else {
        sc.type = wcp_source ? ScenarioType::HonestWcp : ScenarioType::HonestSinglePhoton;
    }
    if (sc.type == ScenarioType::AdversaryWcp && !wcp_source) {
        throw std::invalid_argument("adversary.type wcp requires source.type wcp");
    }

    cfg.rounds = require(j, "rounds").get<std::uint64_t>();
    cfg.seed = j.value("seed", std::uint64_t{0});

    const auto [rate, qber] = honest_expectation(sc);
    cfg.acceptance.expected_rate = rate;
    cfg.acceptance.claimed_position = sc.geometry.p;
    if (j.contains("acceptance")) {
        const auto& acc = j.at("acceptance");
        reject_unknown(acc, {"z", "qber_budget", "expected_rate", "tolerance"},
                       "acceptance");
        cfg.acceptance.z = acc.value("z", 5.0);
        cfg.acceptance.timing_tolerance = acc.value("tolerance", 0.0);
        if (acc.contains("expected_rate")) {
            cfg.acceptance.expected_rate = acc.at("expected_rate").get<double>();
        }
        if (acc.contains("qber_budget")) {
            cfg.acceptance.qber_budget = acc.at("qber_budget").get<double>();
            cfg.scenario.validate();
            return cfg;
        }
    }
    // Default budget: expected honest QBER plus three binomial standard errors.
    const double n_reported = rate * static_cast<double>(cfg.rounds);
    cfg.acceptance.qber_budget =
        n_reported > 0.0 ? qber + 3.0 * std::sqrt(qber * (1.0 - qber) / n_reported)
                         : 0.0;
    cfg.scenario.validate();
    return cfg;
}

nlohmann::json stats_to_json(const SessionStats& stats) {
    return nlohmann::json{{"n_rounds", stats.n_rounds},
                          {"n_reported", stats.n_reported},
                          {"n_errors", stats.n_errors},
                          {"reporting_rate", stats.reporting_rate},
                          {"qber", stats.qber},
                          {"timing_ok", stats.timing_ok},
                          {"consistency_ok", stats.consistency_ok},
                          {"verdict", stats.accept ? "accept" : "reject"}};
}

} // namespace pbqc::st
