#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbqc/decoy.hpp"

#include <cmath>
#include <stdexcept>

using namespace pbqc::decoy;

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((ChannelModel{0.0, 1e-5, 0.01}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChannelModel{1.5, 1e-5, 0.01}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChannelModel{0.5, -1e-5, 0.01}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ChannelModel{0.5, 1e-5, 0.01}.validate()));
    CHECK_THROWS_AS((IntensityPair{0.1, 0.12}.validate()), std::invalid_argument);
    CHECK_NOTHROW((IntensityPair{0.12, 0.1}.validate()));
}

TEST_CASE("honest stats") {
    const ChannelModel ch{0.1, 1e-5, 0.01};
    const auto st = honest_stats(ch, 0.12);
    const double rate = 1e-5 + 1.0 - std::exp(-0.1 * 0.12);
    CHECK(st.rate == doctest::Approx(rate).epsilon(1e-12));
    const double qber = (0.5e-5 + 0.01 * (1.0 - std::exp(-0.1 * 0.12))) / rate;
    CHECK(st.qber == doctest::Approx(qber).epsilon(1e-12));
    CHECK_FALSE(st.degenerate_rate);

    // perfect channel: rate ~ 1, qber ~ e_det
    const auto bright = honest_stats(ChannelModel{1.0, 0.0, 0.01}, 50.0);
    CHECK(bright.rate == doctest::Approx(1.0));
    CHECK(bright.qber == doctest::Approx(0.01));
}

TEST_CASE("adversary stats closed form") {
    const double mu = 0.12, r1 = 0.6;
    const auto st = adversary_stats(mu, r1);
    const double p1 = mu * std::exp(-mu);
    const double pmulti = 1.0 - (1.0 + mu) * std::exp(-mu);
    CHECK(st.rate == doctest::Approx(p1 * r1 + pmulti).epsilon(1e-12));
    CHECK(st.qber == doctest::Approx(p1 * r1 * r1 / 4.0 / st.rate).epsilon(1e-12));

    // r1 = 0: only multiphoton pulses report, all error-free
    const auto silent = adversary_stats(mu, 0.0);
    CHECK(silent.rate == doctest::Approx(pmulti).epsilon(1e-12));
    CHECK(silent.qber == 0.0);
}

TEST_CASE("closed form matches the truncated Poisson sum") {
    for (double mu : {0.018, 0.1, 0.5, 2.0}) {
        for (double r1 : {0.0, 0.3, 1.0}) {
            const auto a = adversary_stats(mu, r1);
            const auto b = adversary_stats_poisson_sum(mu, r1);
            CHECK(a.rate == doctest::Approx(b.rate).epsilon(1e-12));
            CHECK(a.qber == doctest::Approx(b.qber).epsilon(1e-12));
        }
    }
}

TEST_CASE("no-decoy attack feasibility flips once in eta") {
    const double mu = 0.018;
    // well above threshold: secure (attack infeasible)
    CHECK_FALSE(no_decoy_attack_feasible(ChannelModel{0.2, 1e-5, 0.01}, mu));
    // well below: insecure
    CHECK(no_decoy_attack_feasible(ChannelModel{0.03, 1e-5, 0.01}, mu));
    // deep-loss regime stays insecure (multiphoton underreporting)
    CHECK(no_decoy_attack_feasible(ChannelModel{1e-3, 1e-5, 0.01}, mu));
}

TEST_CASE("no-decoy boundary near 11.5 dB at the optimal intensity") {
    const auto b = security_boundary(1e-5, 0.01, IntensityPair{0.018, 0.0}, false);
    CHECK(b.eta_star > 0.065);
    CHECK(b.eta_star < 0.075);
    CHECK(b.eta_star == doctest::Approx(0.070507).epsilon(1e-4));
    CHECK(b.loss_db == doctest::Approx(11.5177).epsilon(1e-4));
    CHECK(b.trace.size() == 256);
    // trace is monotone: insecure below, secure above
    CHECK_FALSE(b.trace.front().second);
    CHECK(b.trace.back().second);
}

TEST_CASE("decoy lower bound on the single-photon rate") {
    const ChannelModel ch{0.1, 1e-5, 0.01};
    const IntensityPair mus{0.12, 0.1};
    const auto s1 = honest_stats(ch, mus.mu1);
    const auto s2 = honest_stats(ch, mus.mu2);
    const double r1l = decoy_lower_bound_r1(s1, s2, mus);
    CHECK(r1l > 0.0);
    CHECK(r1l <= 1.0);
    // the bound can never exceed the true single-photon yield contribution;
    // for an honest channel it should sit close to eta
    CHECK(r1l == doctest::Approx(ch.eta).epsilon(0.05));
    CHECK_THROWS_AS((decoy_lower_bound_r1(s1, s2, IntensityPair{0.12, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("decoy decision at reference parameters") {
    const IntensityPair mus{0.12, 0.1};
    CHECK(decoy_attack_detected(ChannelModel{0.1, 1e-5, 0.01}, mus));
    CHECK_FALSE(decoy_attack_detected(ChannelModel{0.03, 1e-5, 0.01}, mus));
}

TEST_CASE("decoy boundary near 12.65 dB") {
    const auto b = security_boundary(1e-5, 0.01, IntensityPair{0.12, 0.1}, true);
    CHECK(b.eta_star > 0.045);
    CHECK(b.eta_star < 0.055);
    CHECK(b.eta_star == doctest::Approx(0.054305).epsilon(1e-4));
    CHECK(b.loss_db == doctest::Approx(12.6516).epsilon(1e-4));
}

TEST_CASE("decoy tolerates more loss than no-decoy") {
    const auto nd = security_boundary(1e-5, 0.01, IntensityPair{0.018, 0.0}, false);
    const auto d = security_boundary(1e-5, 0.01, IntensityPair{0.12, 0.1}, true);
    CHECK(d.eta_star < nd.eta_star);
    CHECK(d.loss_db > nd.loss_db);
}

TEST_CASE("intensity optimization lands on mu = 0.018 without decoys") {
    std::vector<double> grid;
    for (int i = 5; i <= 50; ++i) grid.push_back(i * 1e-3);
    const auto res = optimize_intensities(1e-5, 0.01, false, grid, {});
    CHECK(res.best.mu1 == doctest::Approx(0.018).epsilon(1e-12));
    CHECK(res.eta_star == doctest::Approx(0.070507).epsilon(1e-4));
    CHECK(res.evaluations.size() == grid.size());
}

TEST_CASE("degenerate and edge cases") {
    // zero dark counts and closed channel: rate is 0 and flagged
    const auto st = honest_stats(ChannelModel{1e-9, 0.0, 0.01}, 1e-9);
    CHECK(st.rate < 1e-15);
    // boundary when secure everywhere in the scan window
    const auto b = security_boundary(0.0, 0.0, IntensityPair{1e-6, 0.0}, false);
    CHECK(b.eta_star <= 1e-4);
}
