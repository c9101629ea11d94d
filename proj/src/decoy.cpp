#include "pbqc/decoy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbqc::decoy {

void ChannelModel::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
    if (!(y0 >= 0.0 && y0 < 1.0)) throw std::invalid_argument("y0 must lie in [0, 1)");
    if (!(e_det >= 0.0 && e_det < 0.5)) throw std::invalid_argument("e_det must lie in [0, 1/2)");
}

void IntensityPair::validate() const {
    if (!(mu1 > 0.0) || !(mu2 >= 0.0) || !(mu1 > mu2)) {
        throw std::invalid_argument("intensities require mu1 > mu2 >= 0");
    }
}

ObservedStats honest_stats(const ChannelModel& channel, double mu) {
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
    const double signal = 1.0 - std::exp(-channel.eta * mu);
    const double rate = channel.y0 + signal;
    if (rate <= 0.0) return ObservedStats{0.0, 0.0, true};
    const double qber = (0.5 * channel.y0 + channel.e_det * signal) / rate;
    return ObservedStats{rate, qber, false};
}

ObservedStats adversary_stats(double mu, double r1) {
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
    if (!(r1 >= 0.0 && r1 <= 1.0)) throw std::invalid_argument("r1 must lie in [0, 1]");
    const double p1 = mu * std::exp(-mu);
    const double multi = 1.0 - (1.0 + mu) * std::exp(-mu); // P(n > 1)
    const double rate = p1 * r1 + multi;
    if (rate <= 0.0) return ObservedStats{0.0, 0.0, true};
    const double qber = p1 * r1 * r1 / (4.0 * rate);
    return ObservedStats{rate, qber, false};
}

ObservedStats adversary_stats_poisson_sum(double mu, double r1) {
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
    if (!(r1 >= 0.0 && r1 <= 1.0)) throw std::invalid_argument("r1 must lie in [0, 1]");
    double rate = 0.0, weighted_err = 0.0;
    double pn = std::exp(-mu); // P(n = 0)
    double tail = 1.0 - pn;
    for (int n = 1; tail > 1e-15; ++n) {
        pn *= mu / n;
        tail -= pn;
        const double rn = (n == 1) ? r1 : 1.0;
        const double qn = (n == 1) ? r1 / 4.0 : 0.0;
        rate += pn * rn;
        weighted_err += pn * rn * qn;
    }
    if (rate <= 0.0) return ObservedStats{0.0, 0.0, true};
    return ObservedStats{rate, weighted_err / rate, false};
}

bool no_decoy_attack_feasible(const ChannelModel& channel, double mu) {
    channel.validate();
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
    const ObservedStats honest = honest_stats(channel, mu);
    const double p1 = mu * std::exp(-mu);
    const double multi = 1.0 - (1.0 + mu) * std::exp(-mu);
    if (p1 <= 0.0) {
        // mu == 0: no signal; only a zero rate can be matched.
        return honest.rate <= 0.0;
    }
    const double r1 = (honest.rate - multi) / p1;
    if (r1 > 1.0) return false; // honest rate is out of the adversaries' reach
    if (r1 < 0.0) {
        // The honest rate is below the full multiphoton yield; the adversaries
        // match it by underreporting multiphoton pulses at zero QBER.
        return true;
    }
    const double attack_qber = p1 * r1 * r1 / (4.0 * honest.rate);
    return attack_qber <= honest.qber;
}

double decoy_lower_bound_r1(const ObservedStats& stats_mu1,
                            const ObservedStats& stats_mu2,
                            const IntensityPair& intensities) {
    intensities.validate();
    const double mu1 = intensities.mu1, mu2 = intensities.mu2;
    if (!(mu2 > 0.0)) throw std::invalid_argument("decoy bound requires mu2 > 0");
    const double pref = mu1 / (mu1 * mu2 - mu2 * mu2);
    const double ratio = (mu2 * mu2) / (mu1 * mu1);
    const double bound =
        pref * (stats_mu2.rate * std::exp(mu2) -
                stats_mu1.rate * std::exp(mu1) * ratio -
                2.0 * stats_mu1.qber * stats_mu1.rate * std::exp(mu1) *
                    (mu1 * mu1 - mu2 * mu2) / (mu1 * mu1));
    return std::clamp(bound, 0.0, 1.0);
}

bool decoy_attack_detected(const ChannelModel& channel, const IntensityPair& intensities) {
    channel.validate();
    intensities.validate();
    const ObservedStats s1 = honest_stats(channel, intensities.mu1);
    const ObservedStats s2 = honest_stats(channel, intensities.mu2);
    const double r1_l = decoy_lower_bound_r1(s1, s2, intensities);
    if (s1.rate <= 0.0) return false;
    const double q_l = intensities.mu1 * std::exp(-intensities.mu1) * r1_l * r1_l /
                       (4.0 * s1.rate);
    return q_l > s1.qber;
}

namespace {

BoundaryResult boundary_impl(double y0, double e_det, const IntensityPair& intensities,
                             bool use_decoy) {
    const auto secure = [&](double eta) {
        ChannelModel ch{eta, y0, e_det};
        if (use_decoy) return decoy_attack_detected(ch, intensities);
        return !no_decoy_attack_feasible(ch, intensities.mu1);
    };

    constexpr int kScanPoints = 256;
    constexpr double kEtaMin = 1e-4;
    constexpr double kEtaMax = 1.0 - 1e-9;
    BoundaryResult result;
    int flips = 0;
    bool prev = false;
    for (int i = 0; i < kScanPoints; ++i) {
        const double eta = kEtaMin + (kEtaMax - kEtaMin) * i / (kScanPoints - 1);
        const bool s = secure(eta);
        if (i > 0 && s != prev) ++flips;
        prev = s;
        result.trace.emplace_back(eta, s);
    }
    if (flips > 1) throw NonMonotoneDecision{result.trace};

    if (flips == 0) {
        // Secure (or insecure) over the whole scan range.
        const bool all_secure = result.trace.front().second;
        result.eta_star = all_secure ? 0.0 : 1.0;
    } else {
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i + 1 < result.trace.size(); ++i) {
            if (result.trace[i].second != result.trace[i + 1].second) {
                lo = result.trace[i].first;
                hi = result.trace[i + 1].first;
                break;
            }
        }
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            (secure(mid) ? hi : lo) = mid;
        }
        result.eta_star = 0.5 * (lo + hi);
    }
    result.loss_db = result.eta_star > 0.0
                         ? -10.0 * std::log10(result.eta_star)
                         : std::numeric_limits<double>::infinity();
    return result;
}

} // namespace

BoundaryResult security_boundary(double y0, double e_det,
                                 const IntensityPair& intensities, bool use_decoy) {
    if (use_decoy) intensities.validate();
    return boundary_impl(y0, e_det, intensities, use_decoy);
}

OptimizeResult optimize_intensities(double y0, double e_det, bool use_decoy,
                                    const std::vector<double>& mu1_grid,
                                    const std::vector<double>& mu2_grid) {
    if (mu1_grid.empty() || (use_decoy && mu2_grid.empty())) {
        throw std::invalid_argument("empty intensity grid");
    }
    OptimizeResult best;
    best.eta_star = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double mu1 : mu1_grid) {
        const std::vector<double> mu2s = use_decoy ? mu2_grid : std::vector<double>{0.0};
        for (double mu2 : mu2s) {
            if (use_decoy && !(mu1 > mu2 && mu2 > 0.0)) continue;
            IntensityPair pair{mu1, mu2};
            const BoundaryResult b = security_boundary(y0, e_det, pair, use_decoy);
            best.evaluations.emplace_back(pair, b.eta_star);
            const bool better =
                !found || b.eta_star < best.eta_star - 1e-12 ||
                (std::abs(b.eta_star - best.eta_star) <= 1e-12 && mu1 > best.best.mu1);
            if (better) {
                best.best = pair;
                best.eta_star = b.eta_star;
                found = true;
            }
        }
    }
    if (!found) throw std::invalid_argument("no admissible grid point");
    return best;
}

} // namespace pbqc::decoy
