#pragma once

#include <utility>
#include <vector>

namespace pbqc::decoy {

struct ChannelModel {
    double eta = 0.05;    // overall transmittance, (0, 1]
    double y0 = 1e-5;     // dark-count probability per gate
    double e_det = 0.01;  // misalignment error probability

    void validate() const;
};

struct IntensityPair {
    double mu1 = 0.12; // signal mean photon number, > mu2
    double mu2 = 0.1;  // decoy mean photon number

    void validate() const;
};

struct ObservedStats {
    double rate = 0.0;
    double qber = 0.0;
    bool degenerate_rate = false; // rate was zero, qber reported as 0
};

// Honest expected reporting rate and QBER for a weak coherent pulse of mean
// photon number mu: R = Y0 + 1 - e^{-eta*mu}, Q = (Y0/2 + e_det*(1 - e^{-eta*mu}))/R.
ObservedStats honest_stats(const ChannelModel& channel, double mu);

// Attack statistics with R0 = Q0 = 0, Q1 = R1/4, and Rn = 1, Qn = 0 for n > 1.
ObservedStats adversary_stats(double mu, double r1);

// Same statistics via the truncated Poisson sums (cross-check path).
ObservedStats adversary_stats_poisson_sum(double mu, double r1);

// True iff the adversaries can match the honest rate with QBER no larger
// than the honest QBER: the protocol is INSECURE at these parameters.
// Multiphoton pulses may be underreported, so a single-photon rate of zero
// always suffices when the honest rate falls below the multiphoton yield.
bool no_decoy_attack_feasible(const ChannelModel& channel, double mu);

// Decoy lower bound on the single-photon reporting rate, clamped to [0, 1].
double decoy_lower_bound_r1(const ObservedStats& stats_mu1,
                            const ObservedStats& stats_mu2,
                            const IntensityPair& intensities);

// True (SECURE) iff the bounded attack QBER exceeds the honest QBER at mu1.
bool decoy_attack_detected(const ChannelModel& channel, const IntensityPair& intensities);

struct BoundaryResult {
    double eta_star = 0.0; // transmittance below which the protocol is insecure
    double loss_db = 0.0;  // -10*log10(eta_star); +inf when eta_star == 0
    std::vector<std::pair<double, bool>> trace; // (eta, secure) scan points
};

struct NonMonotoneDecision {
    std::vector<std::pair<double, bool>> trace;
};

// Bisects the security decision in eta to absolute tolerance 1e-9 after a
// monotonicity scan. Throws NonMonotoneDecision with the scan trace if the
// decision flips more than once on the grid.
BoundaryResult security_boundary(double y0, double e_det,
                                 const IntensityPair& intensities, bool use_decoy);

struct OptimizeResult {
    IntensityPair best;
    double eta_star = 1.0;
    std::vector<std::pair<IntensityPair, double>> evaluations;
};

// Grid search minimizing eta_star; ties break toward larger mu1.
// In no-decoy mode mu2_grid is ignored and mu2 is reported as 0.
OptimizeResult optimize_intensities(double y0, double e_det, bool use_decoy,
                                    const std::vector<double>& mu1_grid,
                                    const std::vector<double>& mu2_grid);

} // namespace pbqc::decoy
