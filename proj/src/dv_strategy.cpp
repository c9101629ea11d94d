#include "pbqc/dv_strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace pbqc::dv {

namespace {
constexpr double kPi = std::numbers::pi;

double ring_error(int m, int n_rings) {
    const double s = std::sin(m * kPi / (2.0 * n_rings));
    return s * s; // sin^2(theta_m / 2), pole-aligned measurement
}
} // namespace

RQPoint evaluate_partition(const bloch::BasisLattice& lattice,
                           const StrategyPartition& partition,
                           const bloch::BlochAngles& measurement) {
    if (partition.size() != lattice.pixels.size()) {
        throw std::invalid_argument("partition size does not match lattice");
    }
    const int k = lattice.k();
    int reported = 0;
    double error_sum = 0.0;
    for (int i = 0; i < k; ++i) {
        switch (partition[i]) {
        case Action::Report:
            ++reported;
            error_sum += bloch::error_probability(lattice.pixels[i], measurement);
            break;
        case Action::Flip:
            ++reported;
            error_sum += 1.0 - bloch::error_probability(lattice.pixels[i], measurement);
            break;
        case Action::Silent:
            break;
        }
    }
    if (reported == 0) return RQPoint{0.0, 0.0};
    return RQPoint{static_cast<double>(reported) / k, error_sum / reported};
}

StrategyFrontier optimal_frontier(int n_rings) {
    if (n_rings < 1) throw std::invalid_argument("frontier requires N >= 1");
    const auto lattice = bloch::build_lattice(n_rings);
    const int k = lattice.k();
    StrategyFrontier frontier;
    for (int m0 = 0; m0 <= n_rings / 2; ++m0) {
        long reported = 0;
        double error_sum = 0.0;
        if (2 * m0 == n_rings) {
            // The equator ring belongs to the report set only; both actions
            // err with probability 1/2 there.
            for (int m = 0; m < m0; ++m) {
                reported += 2L * lattice.ring_sizes[m];
                error_sum += 2.0 * lattice.ring_sizes[m] * ring_error(m, n_rings);
            }
            reported += lattice.ring_sizes[m0];
            error_sum += 0.5 * lattice.ring_sizes[m0];
        } else {
            for (int m = 0; m <= m0; ++m) {
                reported += 2L * lattice.ring_sizes[m];
                error_sum += 2.0 * lattice.ring_sizes[m] * ring_error(m, n_rings);
            }
        }
        frontier.points.push_back(FrontierPoint{
            m0, static_cast<double>(reported) / k, error_sum / reported});
    }
    return frontier;
}

RQPoint asymptotic_point(double theta0) {
    if (!(theta0 >= 0.0 && theta0 <= kPi / 2.0)) {
        throw std::invalid_argument("theta0 must lie in [0, pi/2]");
    }
    const double s = std::sin(theta0 / 2.0);
    const double rate = 2.0 * s * s;
    return RQPoint{rate, rate / 4.0};
}

double max_rate_at_qber(const StrategyFrontier& frontier, double qber_budget) {
    if (frontier.points.empty()) throw std::invalid_argument("empty frontier");
    if (!(qber_budget >= 0.0 && qber_budget <= 0.5)) {
        throw std::invalid_argument("qber budget must lie in [0, 1/2]");
    }
    const auto& pts = frontier.points;
    if (qber_budget >= pts.back().qber) return pts.back().rate;
    if (qber_budget < pts.front().qber) return 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& lo = pts[i];
        const auto& hi = pts[i + 1];
        if (qber_budget >= hi.qber) continue;
        // Mix lo and hi so the blended QBER hits the budget exactly; rate
        // and rate*qber combine affinely under strategy mixing.
        const double a_lo = lo.rate * lo.qber;
        const double a_hi = hi.rate * hi.qber;
        const double denom = (a_hi - a_lo) - qber_budget * (hi.rate - lo.rate);
        if (std::abs(denom) < 1e-300) return hi.rate;
        const double lambda = (a_hi - qber_budget * hi.rate) / denom;
        const double clamped = std::clamp(lambda, 0.0, 1.0);
        return clamped * lo.rate + (1.0 - clamped) * hi.rate;
    }
    return pts.back().rate;
}

double asymptotic_max_rate_at_qber(double qber_budget) {
    if (!(qber_budget >= 0.0 && qber_budget <= 0.5)) {
        throw std::invalid_argument("qber budget must lie in [0, 1/2]");
    }
    return std::min(1.0, 4.0 * qber_budget);
}

namespace {

// Per-ring (report, flip) assignments; within a ring all pixels share the
// same pole-aligned error probability, so only counts matter.
template <typename Fn>
void for_each_assignment(int n_rings, Fn&& fn) {
    const auto lattice = bloch::build_lattice(n_rings);
    const int rings = n_rings + 1;
    std::vector<int> rep(rings, 0), flip(rings, 0);
    // Odometer over (rep_m, flip_m) with rep_m + flip_m <= c_m.
    std::vector<int> state(rings, 0);
    const auto combos = [&](int m) {
        const int c = lattice.ring_sizes[m];
        return (c + 1) * (c + 2) / 2;
    };
    std::vector<std::vector<std::pair<int, int>>> choices(rings);
    for (int m = 0; m < rings; ++m) {
        for (int r = 0; r <= lattice.ring_sizes[m]; ++r) {
            for (int f = 0; r + f <= lattice.ring_sizes[m]; ++f) {
                choices[m].emplace_back(r, f);
            }
        }
    }
    for (;;) {
        long reported = 0;
        double error_sum = 0.0;
        for (int m = 0; m < rings; ++m) {
            const auto [r, f] = choices[m][state[m]];
            reported += r + f;
            const double p = ring_error(m, n_rings);
            error_sum += r * p + f * (1.0 - p);
        }
        fn(reported, error_sum, lattice.k());
        int m = 0;
        while (m < rings) {
            if (++state[m] < combos(m)) break;
            state[m] = 0;
            ++m;
        }
        if (m == rings) break;
    }
}

} // namespace

std::vector<RQPoint> enumerate_partitions(int n_rings) {
    if (n_rings < 1 || n_rings > 3) {
        throw std::invalid_argument("exhaustive enumeration is limited to N <= 3");
    }
    std::vector<RQPoint> out;
    for_each_assignment(n_rings, [&](long reported, double error_sum, int k) {
        if (reported == 0) {
            out.push_back(RQPoint{0.0, 0.0});
        } else {
            out.push_back(RQPoint{static_cast<double>(reported) / k,
                                  error_sum / reported});
        }
    });
    return out;
}

StrategyFrontier brute_force_frontier(int n_rings) {
    if (n_rings < 1 || n_rings > 3) {
        throw std::invalid_argument("exhaustive enumeration is limited to N <= 3");
    }
    const auto lattice = bloch::build_lattice(n_rings);
    const int k = lattice.k();
    // Minimum achievable error sum for each reported-pixel count.
    std::vector<double> min_err(k + 1, std::numeric_limits<double>::infinity());
    for_each_assignment(n_rings, [&](long reported, double error_sum, int) {
        min_err[reported] = std::min(min_err[reported], error_sum);
    });
    // Lower convex hull in the (reported, error_sum) plane; mixtures of
    // strategies sweep the chords, so only hull vertices are undominated.
    struct Pt { long x; double y; };
    std::vector<Pt> hull;
    const auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
        return static_cast<double>(a.x - o.x) * (b.y - o.y) -
               (a.y - o.y) * static_cast<double>(b.x - o.x);
    };
    for (int rep = 0; rep <= k; ++rep) {
        if (!std::isfinite(min_err[rep])) continue;
        Pt p{rep, min_err[rep]};
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 1e-12) {
            hull.pop_back();
        }
        hull.push_back(p);
    }
    StrategyFrontier frontier;
    int idx = 0;
    for (const auto& p : hull) {
        if (p.x == 0) continue;
        frontier.points.push_back(FrontierPoint{
            idx++, static_cast<double>(p.x) / k, p.y / p.x});
    }
    return frontier;
}

RQPoint two_basis_attack() { return RQPoint{0.5, 0.0}; }

void write_frontier_csv(const StrategyFrontier& frontier, std::ostream& out) {
    out << "m0,R1,Q1\n";
    char buf[96];
    for (const auto& p : frontier.points) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g", p.m0, p.rate, p.qber);
        out << buf << '\n';
    }
}

} // namespace pbqc::dv
