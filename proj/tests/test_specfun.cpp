#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "fhlab/specfun.hpp"

using namespace fhlab::specfun;
using std::numbers::pi;

namespace {
double rel(cplx got, cplx want) { return std::abs(got - want) / std::abs(want); }

// closed forms for half-integer orders, the independent cross-check route
cplx k_half(cplx z) { return std::sqrt(pi / (2.0 * z)) * std::exp(-z); }
cplx k_three_half(cplx z) { return k_half(z) * (1.0 + 1.0 / z); }
}  // namespace

TEST_CASE("gamma: closed forms and functional equation") {
  CHECK(gamma_pos(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rel(gamma_pos(0.5), std::sqrt(pi)) < 1e-13);
  for (double x : {0.25, 0.5, 1.5, 3.75, 11.0, 27.0})
    CHECK(rel(gamma_pos(x + 1.0) / gamma_pos(x), x) < 1e-12);
  // frozen high-precision references
  CHECK(rel(gamma_pos(0.1), 9.5135076986687318363) < 1e-13);
  CHECK(rel(gamma_pos(7.25), 1155.3810139199896872) < 1e-13);
  CHECK(rel(gamma_pos(29.5), 1.6348125198274266444e30) < 1e-13);
  CHECK_THROWS_AS(gamma_pos(0.0), std::domain_error);
  CHECK_THROWS_AS(gamma_pos(-2.0), std::domain_error);
}

TEST_CASE("principal root of the space-time symbol") {
  const double xi0[] = {0.0};
  CHECK(std::abs(principal_L(std::span<const double>(xi0, 1), 0.0)) == 0.0);

  const double xi1[] = {1.0 / (2.0 * pi)};
  CHECK(rel(principal_L(std::span<const double>(xi1, 1), 0.0), 1.0) < 1e-15);

  // pure time frequency: argument exactly pi/4
  const cplx L = principal_L(std::span<const double>(xi0, 1), 2.0);
  CHECK(std::arg(L) == doctest::Approx(pi / 4).epsilon(1e-14));
  CHECK(rel(L, std::sqrt(4.0 * pi) * std::exp(cplx(0.0, pi / 4))) < 1e-14);
}

TEST_CASE("principal root squares back to the symbol") {
  for (double xi : {0.0, 0.13, 1.7, 9.0})
    for (double sigma : {-11.0, -0.4, 0.0, 0.7, 23.0}) {
      const double v[] = {xi};
      const cplx L = principal_L(std::span<const double>(v, 1), sigma);
      const cplx lam(4.0 * pi * pi * xi * xi, 2.0 * pi * sigma);
      if (lam == cplx(0.0)) continue;
      CHECK(std::abs(L * L - lam) / std::abs(lam) < 1e-14);
      CHECK(L.real() >= 0.0);
      CHECK(std::abs(std::arg(L)) <= pi / 4 + 1e-14);
    }
}

TEST_CASE("macdonald function against frozen references") {
  // mpmath, 40 digits
  CHECK(rel(macdonald_k(0.5, {1, 0}), 0.46106850444789455844) < 1e-12);
  CHECK(rel(macdonald_k(0.5, {0.01, 0}), 12.408434532846930048) < 1e-12);
  CHECK(rel(macdonald_k(1.5, {1, 0}), 0.92213700889578911688) < 1e-12);
  CHECK(rel(macdonald_k(0.25, {2, 0}), 0.11537827684085675697) < 1e-12);
  CHECK(rel(macdonald_k(0.75, {0.5, 0}), 1.2917498162179126759) < 1e-12);
  CHECK(rel(macdonald_k(0.75, {3, 2.5}),
            cplx(-0.031318731923078299317, -0.0087601183979707727883)) < 1e-12);
  CHECK(rel(macdonald_k(0.3, {0.9, 0.9}),
            cplx(0.1312997347569167465, -0.41354186791232541536)) < 1e-12);
  CHECK(rel(macdonald_k(1.25, {10, -7}),
            cplx(8.4460337615769935986e-6, 1.4760582145975716896e-5)) < 1e-12);
}

TEST_CASE("macdonald half-integer closed forms across the working range") {
  for (double zr = 0.01; zr <= 20.0; zr *= 1.9) {
    CHECK(rel(macdonald_k(0.5, {zr, 0}), k_half({zr, 0})) < 1e-9);
    CHECK(rel(macdonald_k(1.5, {zr, 0}), k_three_half({zr, 0})) < 1e-9);
    // and along the sector boundary
    const cplx z(zr, 0.99 * zr);
    CHECK(rel(macdonald_k(0.5, z), k_half(z)) < 1e-9);
    CHECK(rel(macdonald_k(1.5, z), k_three_half(z)) < 1e-9);
  }
}

TEST_CASE("symmetry in the order and domain errors") {
  const cplx z(1.3, 0.7);
  CHECK(macdonald_k(0.6, z) == macdonald_k(-0.6, z));
  CHECK_THROWS_AS(macdonald_k(0.5, {-1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(macdonald_k(0.5, {1.0, 1.5}), std::domain_error);   // arg > pi/4
  CHECK_THROWS_AS(macdonald_k(2.5, {1.0, 0.0}), std::domain_error);   // order too large
}

TEST_CASE("three-term recurrence on a (s, z) grid") {
  for (double s : {0.25, 0.5, 0.75})
    for (double zr : {0.05, 0.3, 1.0, 4.0, 12.0})
      for (double zi : {0.0, 0.5 * zr, 0.9 * zr}) {
        const cplx z(zr, zi);
        const cplx lhs = (2.0 * s / z) * macdonald_k(s, z) - macdonald_k(s + 1.0, z) +
                         macdonald_k(1.0 - s, z);
        CHECK(std::abs(lhs) <= 1e-9 * std::abs(macdonald_k(1.0 - s, z)));
      }
}

TEST_CASE("positivity and monotone decay on the real axis") {
  for (double nu : {0.25, 0.5, 0.75, 1.5}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double z = 0.05; z < 25.0; z *= 1.35) {
      const cplx k = macdonald_k(nu, {z, 0});
      CHECK(std::abs(k.imag()) < 1e-14 * std::abs(k.real()));
      CHECK(k.real() > 0.0);
      CHECK(k.real() < prev);
      prev = k.real();
    }
  }
}

TEST_CASE("large-z asymptotic decay envelope") {
  for (double nu : {0.25, 0.75, 1.5})
    for (double z : {20.0, 25.0, 30.0}) {
      const double k = macdonald_k(nu, {z, 0}).real();
      CHECK(std::abs(k * std::sqrt(2.0 * z / pi) * std::exp(z) - 1.0) <= 0.1);
    }
}

TEST_CASE("phi boundary value and small-z limit") {
  for (double nu : {0.25, 0.5, 0.75, 1.5}) {
    const double want = std::pow(2.0, nu - 1.0) * gamma_pos(nu);
    CHECK(rel(phi(nu, {0, 0}), want) < 1e-12);
    // the leading boundary correction scales like z^min(2 nu, 2)
    const double z = 1e-5;
    const double lead = std::pow(z, std::min(2.0 * nu, 2.0));
    CHECK(rel(phi(nu, {z, 0}), want) < 5.0 * lead);
  }
  CHECK(rel(phi(0.5, {0, 0}), std::sqrt(pi / 2.0)) < 1e-12);
  CHECK(rel(phi(0.5, {1, 0}), 0.46106850444789455844) < 1e-12);
}

TEST_CASE("phi series and quadrature branches agree at the seam") {
  // both branches against independent references straddling |z| = 1e-3
  CHECK(rel(phi(0.25, {0.999e-3, 0}), 2.090662561288890) < 1e-11);   // series side
  CHECK(rel(phi(0.25, {1.001e-3, 0}), 2.090597392803766) < 1e-11);   // quadrature side
  // branch consistency bounded by the derivative times the gap
  for (double nu : {0.25, 0.5, 0.75, 1.6})
    for (double argf : {0.0, 0.4, 0.78}) {
      const cplx dir = std::exp(cplx(0.0, argf));
      const cplx below = phi(nu, 0.999e-3 * dir);
      const cplx above = phi(nu, 1.001e-3 * dir);
      const double slope = std::abs(phi_prime(nu, 1.0e-3 * dir));
      CHECK(std::abs(below - above) < 2.0 * slope * 2e-6 + 1e-12);
    }
}

TEST_CASE("phi derivative identity by central differences") {
  const double h = 1e-5;
  for (double nu : {0.3, 0.5, 0.75})
    for (double zr : {0.4, 1.0, 3.0}) {
      const cplx z(zr, 0.3 * zr);
      const cplx fd = (phi(nu, z + h) - phi(nu, z - h)) / (2.0 * h);
      const cplx exact = phi_prime(nu, z);
      CHECK(std::abs(fd - exact) < 1e-7 * std::abs(exact));
      // phi' = -z^nu K_{1-nu}
      const cplx alt = -std::pow(z, nu) * macdonald_k(1.0 - nu, z);
      CHECK(std::abs(exact - alt) < 1e-12 * std::abs(alt));
    }
}
