#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbqc/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace pbqc::bloch;
constexpr double pi = std::numbers::pi;

TEST_CASE("angle normalization") {
    auto a = BlochAngles::normalized(pi / 3, 2 * pi + 0.25);
    CHECK(a.theta == doctest::Approx(pi / 3));
    CHECK(a.phi == doctest::Approx(0.25));

    CHECK_THROWS_AS(BlochAngles::normalized(pi + 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BlochAngles::normalized(-0.1, 0.0), std::invalid_argument);

    auto c = BlochAngles::normalized(1.0, -0.5);
    CHECK(c.phi == doctest::Approx(2 * pi - 0.5));

    // poles canonicalize phi to zero
    auto north = BlochAngles::normalized(0.0, 1.234);
    CHECK(north.phi == 0.0);
    auto south = BlochAngles::normalized(pi, 1.234);
    CHECK(south.phi == 0.0);
}

TEST_CASE("antipode") {
    auto a = BlochAngles::normalized(0.4, 1.1);
    auto b = antipode(a);
    CHECK(b.theta == doctest::Approx(pi - 0.4));
    CHECK(b.phi == doctest::Approx(1.1 + pi));
    // antipodal states are orthogonal: error probability 1
    CHECK(error_probability(a, b) == doctest::Approx(1.0));
}

TEST_CASE("lattice N=4 ring structure") {
    auto lat = build_lattice(4);
    CHECK(lat.n_rings == 4);
    REQUIRE(lat.ring_sizes.size() == 5);
    CHECK(lat.ring_sizes[0] == 1);
    CHECK(lat.ring_sizes[1] == 6);
    CHECK(lat.ring_sizes[2] == 9);
    CHECK(lat.ring_sizes[3] == 6);
    CHECK(lat.ring_sizes[4] == 1);
    CHECK(lat.k() == 23);
    CHECK(lat.ring_offset(0) == 0);
    CHECK(lat.ring_offset(2) == 7);
    CHECK(lat.ring_offset(4) == 22);

    // ring-major pixel layout with theta_m = m*pi/4
    CHECK(lat.pixels[0].theta == doctest::Approx(0.0));
    CHECK(lat.pixels[7].theta == doctest::Approx(pi / 2));
    CHECK(lat.pixel_index[7] == std::pair<int, int>{2, 0});
    // phi_{m,n} = pi*n/(N sin theta_m): ring 2, n=3 -> 3*pi/4
    CHECK(lat.pixels[10].phi == doctest::Approx(3 * pi / 4));
}

TEST_CASE("lattice sizes for other N") {
    CHECK(build_lattice(1).k() == 2);  // both poles only
    CHECK(build_lattice(2).k() == 7);  // [1, 5, 1]
    CHECK(build_lattice(3).k() == 14); // [1, 6, 6, 1]
    CHECK(build_lattice(8).k() == 87);
    CHECK_THROWS_AS(build_lattice(0), std::invalid_argument);
}

TEST_CASE("enumerated count tracks the closed form") {
    for (int n : {4, 8, 16, 32}) {
        const long enumerated = build_lattice(n).k();
        const long closed = closed_form_count(n);
        // the closed form drops the per-ring floors; agreement within N
        CHECK(std::abs(enumerated - closed) <= n);
    }
}

TEST_CASE("unitary columns are orthonormal and map poles correctly") {
    auto a = BlochAngles::normalized(0.7, 2.1);
    auto u = unitary(a);
    const double n0 = std::norm(u.u00) + std::norm(u.u10);
    const double n1 = std::norm(u.u01) + std::norm(u.u11);
    const auto inner = std::conj(u.u00) * u.u01 + std::conj(u.u10) * u.u11;
    CHECK(n0 == doctest::Approx(1.0));
    CHECK(n1 == doctest::Approx(1.0));
    CHECK(std::abs(inner) == doctest::Approx(0.0));
    // first column is the +1 eigenstate: cos(theta/2), e^{i phi} sin(theta/2)
    CHECK(std::abs(u.u00) == doctest::Approx(std::cos(0.35)));
    CHECK(std::abs(u.u10) == doctest::Approx(std::sin(0.35)));
}

TEST_CASE("error probability identities") {
    auto z = BlochAngles::normalized(0.0, 0.0);
    // same axis: no error
    CHECK(error_probability(z, z) == doctest::Approx(0.0));
    // orthogonal axis: error 1/2
    auto x = BlochAngles::normalized(pi / 2, 0.0);
    CHECK(error_probability(z, x) == doctest::Approx(0.5));
    // symmetric in its arguments
    auto a = BlochAngles::normalized(0.3, 0.8);
    auto b = BlochAngles::normalized(1.9, 4.4);
    CHECK(error_probability(a, b) == doctest::Approx(error_probability(b, a)));
}

TEST_CASE("error probability equals half the complement of the cosine of the angle") {
    // p = (1 - cos gamma)/2 where gamma is the great-circle angle
    auto a = BlochAngles::normalized(0.6, 1.2);
    auto b = BlochAngles::normalized(2.1, 5.0);
    const double cg = std::cos(a.theta) * std::cos(b.theta) +
                      std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
    CHECK(error_probability(a, b) == doctest::Approx((1.0 - cg) / 2.0).epsilon(1e-12));
}

TEST_CASE("error against the pole depends only on theta") {
    auto pole = BlochAngles::normalized(0.0, 0.0);
    for (double theta : {0.1, 0.9, 2.5}) {
        auto s = BlochAngles::normalized(theta, 3.0);
        const double expect = std::sin(theta / 2) * std::sin(theta / 2);
        CHECK(error_probability(s, pole) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("lattice csv") {
    std::ostringstream out;
    write_lattice_csv(build_lattice(1), out);
    const std::string s = out.str();
    CHECK(s.substr(0, s.find('\n')) == "m,n,theta,phi");
    // header + 2 pixels
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}
