#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace pbqc::cv {

// One or two bosonic modes with quadrature convention q = (a + a^dag)/2,
// p = i(a^dag - a)/2; vacuum covariance I/4.
struct GaussianState {
    Eigen::VectorXd mean; // (q1, p1[, q2, p2])
    Eigen::MatrixXd cov;

    int modes() const { return static_cast<int>(mean.size()) / 2; }
};

GaussianState vacuum(int n_modes);

// R(theta) D(alpha) S(s) |0>: squeezed displaced state rotated by theta.
GaussianState prepare_state(double s, double alpha, double theta);

GaussianState tensor(const GaussianState& a, const GaussianState& b);

// Applies x -> S x (mean) and cov -> S cov S^T.
GaussianState apply_symplectic(const GaussianState& state, const Eigen::MatrixXd& s);

// 50:50 beam splitter on (q1, p1, q2, p2): c = (a - b)/sqrt(2), d = (a + b)/sqrt(2).
Eigen::Matrix4d beam_splitter_symplectic();

// Symplectic form matching the quadrature ordering, [q_i, p_j] = (i/2) delta_ij.
Eigen::MatrixXd symplectic_form(int n_modes);

// Moduli of the symplectic spectrum; physical states have all values >= 1/4.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov);

// Honest conditional variance, Delta_P = e^{-2s}/4 + (1-eta)/(4 eta).
double honest_variance(double s, double eta);

// Conditional variance of the beam-splitter attack, Delta_E = e^{-2s}/4 + 1/4.
double attack_variance(double s);

// One honest round: lossy channel, rotate back by theta, homodyne q_X.
// Returns the reported alpha'.
double simulate_honest_round(double s, double alpha, double theta, double eta,
                             std::mt19937_64& rng);

// One attacked round: signal and vacuum through a 50:50 beam splitter,
// q_X of one output and q_P of the other sampled jointly, then
// alpha' = sqrt(2 eta) (q_c cos(theta) + p_d sin(theta)).
double simulate_attack_round(double s, double alpha, double theta, double eta_claimed,
                             std::mt19937_64& rng);

struct VarianceEstimate {
    double delta = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Sample mean of (alpha - alpha'/sqrt(eta))^2 with its standard error.
VarianceEstimate conditional_variance(std::span<const std::pair<double, double>> rounds,
                                      double eta);

// True iff Delta_P(s, eta) < Delta_E(s), i.e. eta > 1/2; a tie counts as insecure.
bool cv_secure(double eta, double s);

} // namespace pbqc::cv
