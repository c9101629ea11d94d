#include "pbqc/bloch.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace pbqc::bloch {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

BlochAngles BlochAngles::normalized(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw std::invalid_argument("theta must lie in [0, pi]");
    }
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0; // fmod may round up to 2*pi
    if (theta == 0.0 || theta == kPi) phi = 0.0;
    return BlochAngles{theta, phi};
}

BlochAngles antipode(const BlochAngles& a) {
    return BlochAngles::normalized(kPi - a.theta, a.phi + kPi);
}

int BasisLattice::ring_offset(int m) const {
    int off = 0;
    for (int i = 0; i < m; ++i) off += ring_sizes[i];
    return off;
}

BasisLattice build_lattice(int n_rings) {
    if (n_rings < 1) throw std::invalid_argument("lattice requires N >= 1");
    BasisLattice lat;
    lat.n_rings = n_rings;
    for (int m = 0; m <= n_rings; ++m) {
        const double theta = m * kPi / n_rings;
        const double s = std::sin(theta);
        const int count = 1 + static_cast<int>(std::floor(2.0 * n_rings * s));
        lat.ring_sizes.push_back(count);
        for (int n = 0; n < count; ++n) {
            double phi = (s > 0.0) ? kPi * n / (n_rings * s) : 0.0;
            lat.pixels.push_back(BlochAngles::normalized(theta, phi));
            lat.pixel_index.emplace_back(m, n);
        }
    }
    return lat;
}

long closed_form_count(int n_rings) {
    if (n_rings < 1) throw std::invalid_argument("lattice requires N >= 1");
    const double half = kPi / (2.0 * n_rings);
    return static_cast<long>(std::floor(n_rings * (1.0 + 2.0 / std::tan(half))));
}

QubitUnitary unitary(const BlochAngles& a) {
    const double c = std::cos(a.theta / 2.0);
    const double s = std::sin(a.theta / 2.0);
    const std::complex<double> eip = std::polar(1.0, a.phi);
    return QubitUnitary{c, eip * s, -std::conj(eip) * s, c};
}

double error_probability(const BlochAngles& state, const BlochAngles& measurement) {
    const double dt = (state.theta - measurement.theta) / 2.0;
    const double dp = (state.phi - measurement.phi) / 2.0;
    const double st = std::sin(dt);
    const double sp = std::sin(dp);
    return st * st + sp * sp * std::sin(state.theta) * std::sin(measurement.theta);
}

void write_lattice_csv(const BasisLattice& lattice, std::ostream& out) {
    out << "m,n,theta,phi\n";
    char buf[64];
    for (std::size_t i = 0; i < lattice.pixels.size(); ++i) {
        const auto [m, n] = lattice.pixel_index[i];
        std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g", m, n,
                      lattice.pixels[i].theta, lattice.pixels[i].phi);
        out << buf << '\n';
    }
}

} // namespace pbqc::bloch
