#pragma once

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

namespace pbqc::bloch {

// A point on the Bloch sphere, theta in [0, pi], phi in [0, 2*pi).
// Poles are canonicalized to phi = 0.
struct BlochAngles {
    double theta = 0.0;
    double phi = 0.0;

    // Reduces phi mod 2*pi; rejects theta outside [0, pi].
    static BlochAngles normalized(double theta, double phi);
};

// The antipodal point: (pi - theta, phi + pi).
BlochAngles antipode(const BlochAngles& a);

// Finite set of measurement bases arranged in rings theta_m = m*pi/N,
// m = 0..N inclusive, with 1 + floor(2N sin theta_m) pixels per ring.
struct BasisLattice {
    int n_rings = 0;                              // N
    std::vector<int> ring_sizes;                  // size N+1
    std::vector<BlochAngles> pixels;              // ring-major order
    std::vector<std::pair<int, int>> pixel_index; // (m, n) per pixel

    int k() const { return static_cast<int>(pixels.size()); }
    // First pixel index of ring m.
    int ring_offset(int m) const;
};

BasisLattice build_lattice(int n_rings);

// The closed-form count floor(N*(1 + 2*cot(pi/2N))). Diagnostic only; the
// normative pixel count is the enumerated one.
long closed_form_count(int n_rings);

struct QubitUnitary {
    std::complex<double> u00, u01, u10, u11;
};

// U(theta, phi) with columns U|0>, U|1> spanning the measurement basis.
QubitUnitary unitary(const BlochAngles& a);

// Probability that a projective measurement along `measurement` yields the
// outcome opposite to the bit encoded along `state`. Symmetric.
double error_probability(const BlochAngles& state, const BlochAngles& measurement);

// CSV columns: m, n, theta, phi.
void write_lattice_csv(const BasisLattice& lattice, std::ostream& out);

} // namespace pbqc::bloch
