#include "pbqc/cv.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace pbqc::cv {

GaussianState vacuum(int n_modes) {
    if (n_modes < 1 || n_modes > 2) throw std::invalid_argument("1 or 2 modes supported");
    GaussianState st;
    st.mean = Eigen::VectorXd::Zero(2 * n_modes);
    st.cov = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes) * 0.25;
    return st;
}

GaussianState prepare_state(double s, double alpha, double theta) {
    if (!std::isfinite(s) || !std::isfinite(alpha) || !std::isfinite(theta)) {
        throw std::invalid_argument("non-finite preparation parameter");
    }
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2d squeezed = Eigen::Matrix2d::Zero();
    squeezed(0, 0) = std::exp(-2.0 * s) / 4.0;
    squeezed(1, 1) = std::exp(2.0 * s) / 4.0;
    GaussianState st;
    st.mean = rot * Eigen::Vector2d(alpha, 0.0);
    st.cov = rot * squeezed * rot.transpose();
    return st;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    GaussianState st;
    const auto na = a.mean.size(), nb = b.mean.size();
    st.mean.resize(na + nb);
    st.mean << a.mean, b.mean;
    st.cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
    st.cov.topLeftCorner(na, na) = a.cov;
    st.cov.bottomRightCorner(nb, nb) = b.cov;
    return st;
}

GaussianState apply_symplectic(const GaussianState& state, const Eigen::MatrixXd& s) {
    GaussianState out;
    out.mean = s * state.mean;
    out.cov = s * state.cov * s.transpose();
    return out;
}

Eigen::Matrix4d beam_splitter_symplectic() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix4d b;
    // (q_c, p_c, q_d, p_d) from (q_a, p_a, q_b, p_b)
    b << r, 0, -r, 0,
         0, r, 0, -r,
         r, 0, r, 0,
         0, r, 0, r;
    return b;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int i = 0; i < n_modes; ++i) {
        omega(2 * i, 2 * i + 1) = 0.5;
        omega(2 * i + 1, 2 * i) = -0.5;
    }
    return omega;
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
    const int n = static_cast<int>(cov.rows()) / 2;
    // Omega here carries entries +-1/2, so eig(2*Omega*cov) = +-i*nu.
    const Eigen::MatrixXd m = 2.0 * symplectic_form(n) * cov;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    std::vector<double> out;
    for (int i = 0; i < m.rows(); ++i) {
        const double v = std::abs(solver.eigenvalues()[i]);
        bool dup = false;
        for (double existing : out) dup = dup || std::abs(existing - v) < 1e-9;
        if (!dup) out.push_back(v);
    }
    return out;
}

double honest_variance(double s, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
    return 0.25 * std::exp(-2.0 * s) + (1.0 - eta) / (4.0 * eta);
}

double attack_variance(double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("s must be >= 0");
    return 0.25 * std::exp(-2.0 * s) + 0.25;
}

double simulate_honest_round(double s, double alpha, double theta, double eta,
                             std::mt19937_64& rng) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
    (void)theta; // the rotation and its inverse cancel for the honest prover
    const double var = eta * std::exp(-2.0 * s) / 4.0 + (1.0 - eta) / 4.0;
    std::normal_distribution<double> noise(0.0, std::sqrt(var));
    return std::sqrt(eta) * alpha + noise(rng);
}

double simulate_attack_round(double s, double alpha, double theta, double eta_claimed,
                             std::mt19937_64& rng) {
    if (!(eta_claimed > 0.0 && eta_claimed <= 1.0)) {
        throw std::invalid_argument("eta must lie in (0, 1]");
    }
    const GaussianState joint =
        apply_symplectic(tensor(prepare_state(s, alpha, theta), vacuum(1)),
                         beam_splitter_symplectic());
    // Joint marginal of q_c (index 0) and p_d (index 3).
    Eigen::Vector2d mean(joint.mean(0), joint.mean(3));
    Eigen::Matrix2d cov;
    cov << joint.cov(0, 0), joint.cov(0, 3), joint.cov(3, 0), joint.cov(3, 3);
    const Eigen::Matrix2d chol = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
    std::normal_distribution<double> unit(0.0, 1.0);
    const Eigen::Vector2d z(unit(rng), unit(rng));
    const Eigen::Vector2d sample = mean + chol * z;
    return std::sqrt(2.0 * eta_claimed) *
           (sample(0) * std::cos(theta) + sample(1) * std::sin(theta));
}

VarianceEstimate conditional_variance(std::span<const std::pair<double, double>> rounds,
                                      double eta) {
    if (rounds.size() < 2) throw std::invalid_argument("need at least 2 rounds");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
    const double inv_sqrt_eta = 1.0 / std::sqrt(eta);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [alpha, reported] : rounds) {
        const double r = alpha - reported * inv_sqrt_eta;
        sum += r * r;
        sum_sq += r * r * r * r;
    }
    const double n = static_cast<double>(rounds.size());
    const double mean = sum / n;
    const double var_of_sq = (sum_sq - n * mean * mean) / (n - 1.0);
    return VarianceEstimate{mean, std::sqrt(var_of_sq / n), rounds.size()};
}

bool cv_secure(double eta, double s) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
    return honest_variance(s, eta) < attack_variance(s);
}

} // namespace pbqc::cv
