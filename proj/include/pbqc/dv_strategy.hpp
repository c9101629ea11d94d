#pragma once

#include "pbqc/bloch.hpp"

#include <iosfwd>
#include <vector>

namespace pbqc::dv {

// Per-pixel adversary action for an intercepted single-photon round.
enum class Action { Report, Flip, Silent };

using StrategyPartition = std::vector<Action>;

struct RQPoint {
    double rate = 0.0; // R1
    double qber = 0.0; // Q1
};

struct FrontierPoint {
    int m0 = 0;
    double rate = 0.0;
    double qber = 0.0;
};

// Pareto-optimal (R1, Q1) points, ordered by increasing R1.
struct StrategyFrontier {
    std::vector<FrontierPoint> points;
};

// Exact (R1, Q1) of an arbitrary partition against a fixed adversary
// measurement direction.
RQPoint evaluate_partition(const bloch::BasisLattice& lattice,
                           const StrategyPartition& partition,
                           const bloch::BlochAngles& measurement);

// Optimal report/flip frontier for the N-ring lattice, one point per
// m0 = 0..floor(N/2), measurement fixed at the north pole. Rings m <= m0
// are reported, rings m >= N-m0 are flipped; for even N the equator ring
// at m0 = N/2 is reported once.
StrategyFrontier optimal_frontier(int n_rings);

// Continuous-limit point at reporting cap theta0 in [0, pi/2]:
// R1 = 2 sin^2(theta0/2), Q1 = R1/4.
RQPoint asymptotic_point(double theta0);

// Largest reporting rate achievable with QBER <= budget, allowing
// probabilistic mixing of adjacent frontier strategies. Mixtures combine
// affinely in the (R1, R1*Q1) plane.
double max_rate_at_qber(const StrategyFrontier& frontier, double qber_budget);

// Closed form of the same inversion for the continuous limit: R1 = 4*Q1.
double asymptotic_max_rate_at_qber(double qber_budget);

// Exhaustive Pareto frontier over all per-ring (report, flip) count
// assignments; the oracle for optimal_frontier. Refuses N > 3.
StrategyFrontier brute_force_frontier(int n_rings);

// Enumerates every per-ring assignment as (R1, Q1) pairs (oracle support).
std::vector<RQPoint> enumerate_partitions(int n_rings);

// BB84 intercept-resend point: 50% reporting rate at zero QBER.
RQPoint two_basis_attack();

// CSV columns: m0, R1, Q1.
void write_frontier_csv(const StrategyFrontier& frontier, std::ostream& out);

} // namespace pbqc::dv
