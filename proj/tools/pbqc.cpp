#include "pbqc/bloch.hpp"
#include "pbqc/cv.hpp"
#include "pbqc/decoy.hpp"
#include "pbqc/dv_strategy.hpp"
#include "pbqc/spacetime.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "pbqc 0.1.0";
constexpr int kExitUsage = 1;
constexpr int kExitReject = 2;

// Rounds to 12 significant digits so re-runs emit byte-identical numbers.
double sig12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::string format12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json loss_db_json(double loss_db) {
    if (std::isinf(loss_db)) return nullptr;
    return sig12(loss_db);
}

struct OutputTarget {
    std::string path = "-";

    void write(const std::string& content) const {
        if (path == "-") {
            std::cout << content;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + path);
        out << content;
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json preamble(const json& resolved_config, std::uint64_t seed) {
    return json{{"tool_version", kToolVersion}, {"config", resolved_config}, {"seed", seed}};
}

// ---- dv-curve ----------------------------------------------------------

int run_dv_curve(const std::vector<int>& n_list, bool asymptotic, int theta_steps,
                 const OutputTarget& out, const std::string& format) {
    json config{{"subcommand", "dv-curve"},
                {"n", n_list},
                {"asymptotic", asymptotic},
                {"theta_steps", theta_steps}};
    json rows = json::array();
    for (int n : n_list) {
        const auto frontier = pbqc::dv::optimal_frontier(n);
        for (const auto& p : frontier.points) {
            rows.push_back(json{{"source", std::to_string(n)},
                                {"m0_or_theta0", sig12(p.m0)},
                                {"R1", sig12(p.rate)},
                                {"Q1", sig12(p.qber)}});
        }
    }
    if (asymptotic) {
        for (int i = 0; i <= theta_steps; ++i) {
            const double theta0 = std::numbers::pi / 2.0 * i / theta_steps;
            const auto p = pbqc::dv::asymptotic_point(theta0);
            rows.push_back(json{{"source", "asymptotic"},
                                {"m0_or_theta0", sig12(theta0)},
                                {"R1", sig12(p.rate)},
                                {"Q1", sig12(p.qber)}});
        }
    }
    if (format == "json") {
        json doc = preamble(config, 0);
        doc["rows"] = rows;
        out.write(dump(doc));
    } else {
        std::ostringstream csv;
        csv << "# " << kToolVersion << "\n# config: " << config.dump() << "\n";
        csv << "source,m0_or_theta0,R1,Q1\n";
        for (const auto& r : rows) {
            csv << r.at("source").get<std::string>() << ','
                << format12(r.at("m0_or_theta0").get<double>()) << ','
                << format12(r.at("R1").get<double>()) << ','
                << format12(r.at("Q1").get<double>()) << '\n';
        }
        out.write(csv.str());
    }
    return 0;
}

// ---- decoy-boundary ----------------------------------------------------

json boundary_to_json(const pbqc::decoy::BoundaryResult& b) {
    json trace = json::array();
    for (const auto& [eta, secure] : b.trace) {
        trace.push_back(json{{"eta", sig12(eta)}, {"secure", secure}});
    }
    return json{{"eta_star", sig12(b.eta_star)},
                {"loss_db", loss_db_json(b.loss_db)},
                {"decision_trace", trace}};
}

int run_decoy_boundary(double y0, double e_det, double mu1, double mu2,
                       const std::string& mode, const OutputTarget& out) {
    const bool use_decoy = mode == "decoy";
    json config{{"subcommand", "decoy-boundary"}, {"y0", y0},   {"e_det", e_det},
                {"mu1", mu1},                     {"mu2", mu2}, {"mode", mode}};
    try {
        const auto boundary =
            pbqc::decoy::security_boundary(y0, e_det, {mu1, mu2}, use_decoy);
        json doc = preamble(config, 0);
        doc["parameters"] = json{{"y0", y0}, {"e_det", e_det}, {"mu1", mu1},
                                 {"mu2", use_decoy ? json(mu2) : json(nullptr)}};
        doc.update(boundary_to_json(boundary));
        out.write(dump(doc));
        return 0;
    } catch (const pbqc::decoy::NonMonotoneDecision& e) {
        std::cerr << "error: security decision is not monotone in eta; scan trace:\n";
        for (const auto& [eta, secure] : e.trace) {
            std::cerr << "  eta=" << format12(eta) << " secure=" << secure << "\n";
        }
        return kExitUsage;
    }
}

// ---- optimize-mu -------------------------------------------------------

std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-12) break;
        grid.push_back(v);
    }
    return grid;
}

int run_optimize_mu(const std::string& mode, double mu1_lo, double mu1_hi,
                    double mu1_step, double mu2_lo, double mu2_hi, double mu2_step,
                    double y0, double e_det, const OutputTarget& out) {
    const bool use_decoy = mode == "decoy";
    json config{{"subcommand", "optimize-mu"},
                {"mode", mode},
                {"y0", y0},
                {"e_det", e_det},
                {"mu1_grid", {mu1_lo, mu1_hi, mu1_step}},
                {"mu2_grid", {mu2_lo, mu2_hi, mu2_step}}};
    const auto result = pbqc::decoy::optimize_intensities(
        y0, e_det, use_decoy, make_grid(mu1_lo, mu1_hi, mu1_step),
        use_decoy ? make_grid(mu2_lo, mu2_hi, mu2_step) : std::vector<double>{});
    json doc = preamble(config, 0);
    doc["best"] = json{{"mu1", sig12(result.best.mu1)},
                       {"mu2", use_decoy ? json(sig12(result.best.mu2)) : json(nullptr)},
                       {"eta_star", sig12(result.eta_star)},
                       {"loss_db", loss_db_json(result.eta_star > 0.0
                                                    ? -10.0 * std::log10(result.eta_star)
                                                    : INFINITY)}};
    json evals = json::array();
    for (const auto& [pair, eta_star] : result.evaluations) {
        evals.push_back(json{{"mu1", sig12(pair.mu1)},
                             {"mu2", sig12(pair.mu2)},
                             {"eta_star", sig12(eta_star)}});
    }
    doc["evaluations"] = evals;
    out.write(dump(doc));
    return 0;
}

// ---- cv ----------------------------------------------------------------

int run_cv(std::vector<double> s_list, std::vector<double> eta_list,
           std::uint64_t n_rounds, std::uint64_t seed, const OutputTarget& out) {
    std::sort(s_list.begin(), s_list.end());
    std::sort(eta_list.begin(), eta_list.end());
    json config{{"subcommand", "cv"},
                {"s", s_list},
                {"eta", eta_list},
                {"rounds", n_rounds}};
    json rows = json::array();
    std::mt19937_64 rng(seed);
    for (double s : s_list) {
        for (double eta : eta_list) {
            json row{{"s", sig12(s)},
                     {"eta", sig12(eta)},
                     {"delta_honest", sig12(pbqc::cv::honest_variance(s, eta))},
                     {"delta_attack", sig12(pbqc::cv::attack_variance(s))},
                     {"secure", pbqc::cv::cv_secure(eta, s)}};
            if (n_rounds >= 2) {
                std::normal_distribution<double> modulation(0.0, 1.0);
                std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
                std::vector<std::pair<double, double>> rounds;
                rounds.reserve(n_rounds);
                for (std::uint64_t i = 0; i < n_rounds; ++i) {
                    const double alpha = modulation(rng);
                    rounds.emplace_back(alpha, pbqc::cv::simulate_honest_round(
                                                   s, alpha, angle(rng), eta, rng));
                }
                const auto est = pbqc::cv::conditional_variance(rounds, eta);
                row["mc_estimate"] = sig12(est.delta);
                row["std_error"] = sig12(est.std_error);
            } else {
                row["mc_estimate"] = nullptr;
                row["std_error"] = nullptr;
            }
            rows.push_back(std::move(row));
        }
    }
    json doc = preamble(config, seed);
    doc["rows"] = rows;
    out.write(dump(doc));
    return 0;
}

// ---- simulate ----------------------------------------------------------

json scenario_config_to_json(const pbqc::st::SessionConfig& cfg) {
    const auto& sc = cfg.scenario;
    const char* type = nullptr;
    switch (sc.type) {
    case pbqc::st::ScenarioType::HonestSinglePhoton: type = "honest_single_photon"; break;
    case pbqc::st::ScenarioType::HonestWcp: type = "honest_wcp"; break;
    case pbqc::st::ScenarioType::AdversaryLattice: type = "adversary_lattice"; break;
    case pbqc::st::ScenarioType::AdversaryBb84: type = "adversary_bb84"; break;
    case pbqc::st::ScenarioType::AdversaryWcp: type = "adversary_wcp"; break;
    case pbqc::st::ScenarioType::AdversaryWait: type = "adversary_wait"; break;
    }
    return json{
        {"scenario", type},
        {"geometry", {{"v0", sc.geometry.v0}, {"e0", sc.geometry.e0}, {"p", sc.geometry.p},
                      {"e1", sc.geometry.e1}, {"v1", sc.geometry.v1}}},
        {"channel", {{"eta", sc.channel.eta}, {"y0", sc.channel.y0},
                     {"e_det", sc.channel.e_det}}},
        {"mu", sc.mu},
        {"lattice_n", sc.lattice_n},
        {"m0", sc.m0},
        {"rounds", cfg.rounds},
        {"acceptance", {{"z", cfg.acceptance.z},
                        {"qber_budget", sig12(cfg.acceptance.qber_budget)},
                        {"expected_rate", sig12(cfg.acceptance.expected_rate)},
                        {"tolerance", cfg.acceptance.timing_tolerance}}}};
}

int run_simulate(const std::string& config_path, const OutputTarget& out,
                 const std::string& rounds_csv) {
    json config_json;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file: " << config_path << "\n";
            return kExitUsage;
        }
        try {
            in >> config_json;
        } catch (const json::parse_error& e) {
            std::cerr << "error: malformed config JSON: " << e.what() << "\n";
            return kExitUsage;
        }
    }
    pbqc::st::SessionConfig cfg;
    try {
        cfg = pbqc::st::session_config_from_json(config_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::unique_ptr<std::ofstream> csv;
    if (!rounds_csv.empty()) {
        csv = std::make_unique<std::ofstream>(rounds_csv, std::ios::binary);
        if (!*csv) {
            std::cerr << "error: cannot open rounds CSV: " << rounds_csv << "\n";
            return kExitUsage;
        }
        *csv << "round,reported,bit,arrival_v0,arrival_v1,timing_ok,cross_ok\n";
    }
    const auto on_round = [&](std::uint64_t i, const pbqc::st::RoundOutcome& r) {
        if (!csv) return;
        const bool timing = pbqc::st::verify_timing(r, cfg.scenario.geometry,
                                                    cfg.acceptance.claimed_position,
                                                    cfg.acceptance.timing_tolerance);
        *csv << i << ',' << (r.report_v0 ? 1 : 0) << ','
             << (r.report_v0 ? std::to_string(r.report_v0->bit) : std::string())
             << ','
             << (r.report_v0 ? format12(r.report_v0->arrival_time) : std::string())
             << ','
             << (r.report_v1 ? format12(r.report_v1->arrival_time) : std::string())
             << ',' << timing << ',' << pbqc::st::cross_check(r) << '\n';
    };

    const auto stats = pbqc::st::run_session(cfg.scenario, cfg.rounds, cfg.acceptance,
                                             cfg.seed, on_round);
    json doc = preamble(scenario_config_to_json(cfg), cfg.seed);
    json stats_json = pbqc::st::stats_to_json(stats);
    stats_json["reporting_rate"] = sig12(stats.reporting_rate);
    stats_json["qber"] = sig12(stats.qber);
    doc["stats"] = stats_json;
    out.write(dump(doc));
    return stats.accept ? 0 : kExitReject;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Position-based quantum cryptography analysis toolkit"};
    app.set_version_flag("--version", kToolVersion);

    OutputTarget out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    app.add_option("--output", out.path, "Output path, '-' for stdout");
    app.add_option("--format", format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "Random seed");
    app.fallthrough();
    app.require_subcommand(1);

    // dv-curve
    auto* dv = app.add_subcommand("dv-curve", "Reporting-rate vs QBER frontier");
    std::vector<int> n_list;
    bool asymptotic = false;
    int theta_steps = 64;
    dv->add_option("--n", n_list, "Lattice ring counts N (repeatable)");
    dv->add_flag("--asymptotic", asymptotic, "Include the continuous-limit curve");
    dv->add_option("--theta-steps", theta_steps, "Samples of the asymptotic curve")
        ->check(CLI::PositiveNumber);

    // decoy-boundary
    auto* db = app.add_subcommand("decoy-boundary", "Security boundary in eta");
    double y0 = 1e-5, e_det = 0.01, mu1 = 0.12, mu2 = 0.1;
    std::string mode = "decoy";
    db->add_option("--y0", y0, "Dark-count probability");
    db->add_option("--edet", e_det, "Misalignment error probability");
    db->add_option("--mu1", mu1, "Signal intensity");
    db->add_option("--mu2", mu2, "Decoy intensity");
    db->add_option("--mode", mode, "decoy or no-decoy")
        ->check(CLI::IsMember({"decoy", "no-decoy"}));

    // optimize-mu
    auto* om = app.add_subcommand("optimize-mu", "Intensity grid search");
    double mu1_lo = 0.05, mu1_hi = 0.2, mu1_step = 0.01;
    double mu2_lo = 0.05, mu2_hi = 0.15, mu2_step = 0.01;
    std::string om_mode = "decoy";
    om->add_option("--mode", om_mode, "decoy or no-decoy")
        ->check(CLI::IsMember({"decoy", "no-decoy"}));
    om->add_option("--mu1-min", mu1_lo, "Signal grid start");
    om->add_option("--mu1-max", mu1_hi, "Signal grid end");
    om->add_option("--mu1-step", mu1_step, "Signal grid step");
    om->add_option("--mu2-min", mu2_lo, "Decoy grid start");
    om->add_option("--mu2-max", mu2_hi, "Decoy grid end");
    om->add_option("--mu2-step", mu2_step, "Decoy grid step");
    om->add_option("--y0", y0, "Dark-count probability");
    om->add_option("--edet", e_det, "Misalignment error probability");

    // cv
    auto* cv_cmd = app.add_subcommand("cv", "Continuous-variable variance report");
    std::vector<double> s_list{0.0};
    std::vector<double> eta_list{0.25, 0.5, 0.75, 1.0};
    std::uint64_t cv_rounds = 0;
    cv_cmd->add_option("--s", s_list, "Squeezing parameters (repeatable)");
    cv_cmd->add_option("--eta", eta_list, "Transmittances (repeatable)");
    cv_cmd->add_option("--rounds", cv_rounds, "Monte Carlo rounds, 0 for analytic only");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a protocol session");
    std::string config_path, rounds_csv;
    sim->add_option("--config", config_path, "Scenario config JSON")->required();
    sim->add_option("--rounds-csv", rounds_csv, "Optional per-round CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*dv) {
            if (n_list.empty() && !asymptotic) {
                std::cerr << "error: dv-curve needs --n and/or --asymptotic\n";
                return kExitUsage;
            }
            return run_dv_curve(n_list, asymptotic, theta_steps, out, format);
        }
        if (*db) return run_decoy_boundary(y0, e_det, mu1, mu2, mode, out);
        if (*om) {
            if (om_mode == "no-decoy" && !om->count("--mu1-min")) {
                mu1_lo = 0.005, mu1_hi = 0.05, mu1_step = 0.001;
            }
            return run_optimize_mu(om_mode, mu1_lo, mu1_hi, mu1_step, mu2_lo, mu2_hi,
                                   mu2_step, y0, e_det, out);
        }
        if (*cv_cmd) return run_cv(s_list, eta_list, cv_rounds, seed, out);
        if (*sim) return run_simulate(config_path, out, rounds_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
