#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "common.hpp"
#include "fhlab/fields.hpp"

using namespace fhlab::fields;
using testutil::grid64;
using testutil::put_mode;
using testutil::rel_l2;
using std::numbers::pi;

namespace {

SpaceTimeField random_field(const SpaceTimeGrid& g, unsigned seed, bool real = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> samples(g.total());
  for (auto& c : samples) c = {d(rng), real ? 0.0 : d(rng)};
  return SpaceTimeField::from_samples(g, std::move(samples));
}

// physical-space route for e^{-tau H}: wrapped heat kernel in x convolved
// with the time-shifted samples (time shift applied spectrally, which is
// exact for band-limited data). Test oracle only.
SpaceTimeField semigroup_by_convolution(const SpaceTimeField& u, double tau) {
  const auto& g = u.grid();
  REQUIRE(g.dim == 1);
  const SpaceTimeField shifted = time_shift(u, -tau);
  std::vector<double> kernel(g.nx[0], 0.0);
  for (int j = 0; j < g.nx[0]; ++j) {
    const double x = g.x_of(0, j);
    for (int img = -6; img <= 6; ++img) {
      const double z = x + img * g.lx[0];
      kernel[j] += std::exp(-z * z / (4.0 * tau)) / std::sqrt(4.0 * pi * tau);
    }
  }
  std::vector<cplx> out(g.total(), 0.0);
  for (int j = 0; j < g.nx[0]; ++j)
    for (int k = 0; k < g.nx[0]; ++k) {
      const int diff = ((j - k) % g.nx[0] + g.nx[0]) % g.nx[0];
      for (int jt = 0; jt < g.nt; ++jt)
        out[g.index(j, 0, jt)] += kernel[diff] * shifted.samples()[g.index(k, 0, jt)] * g.dx(0);
    }
  return SpaceTimeField::from_samples(g, std::move(out));
}

}  // namespace

TEST_CASE("grid validation") {
  SpaceTimeGrid g = grid64();
  CHECK_NOTHROW(g.validate());
  g.nx[0] = 48;  // not a power of two
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = grid64();
  g.nt = 4;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = grid64();
  g.tspan = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("forward transform of a single wave is an indicator") {
  const auto g = grid64();
  std::vector<cplx> samples(g.total());
  const double xi = 3.0 / g.lx[0], sigma = -2.0 / g.tspan;
  for (int j = 0; j < g.nx[0]; ++j)
    for (int jt = 0; jt < g.nt; ++jt)
      samples[g.index(j, 0, jt)] =
          std::exp(cplx(0.0, 2.0 * pi * (xi * g.x_of(0, j) + sigma * g.t_of(jt))));
  const auto f = SpaceTimeField::from_samples(g, samples);
  for (int j = 0; j < g.nx[0]; ++j)
    for (int jt = 0; jt < g.nt; ++jt) {
      const cplx c = f.spectrum()[g.index(j, 0, jt)];
      const bool hit = SpaceTimeGrid::signed_index(j, g.nx[0]) == 3 &&
                       SpaceTimeGrid::signed_index(jt, g.nt) == -2;
      CHECK(std::abs(c - (hit ? cplx(g.total()) : cplx(0.0))) < 1e-8 * g.total());
    }
}

TEST_CASE("round trip and Parseval") {
  for (int dim : {1, 2}) {
    SpaceTimeGrid g = grid64(dim);
    if (dim == 2) {
      g.nx = {16, 16};
      g.nt = 16;
    }
    const auto u = random_field(g, 7 + dim);
    const auto back = dft_inverse(g, u.spectrum());
    double worst = 0.0;
    for (int i = 0; i < g.total(); ++i) worst = std::max(worst, std::abs(back[i] - u.samples()[i]));
    CHECK(worst < 1e-12 * u.linf_norm());
    const double l2 = u.l2_norm();
    CHECK(std::abs(u.spectral_energy() - l2 * l2) < 1e-10 * l2 * l2);
  }
}

TEST_CASE("real even data has Hermitian spectrum") {
  const auto g = grid64();
  std::vector<cplx> samples(g.total());
  for (int j = 0; j < g.nx[0]; ++j)
    for (int jt = 0; jt < g.nt; ++jt) {
      const double c = std::cos(2.0 * pi * g.x_of(0, j) / g.lx[0]);
      samples[g.index(j, 0, jt)] = 1.0 + 0.5 * c + 0.25 * c * c;
    }
  const auto f = SpaceTimeField::from_samples(g, samples);
  for (int j = 0; j < g.nx[0]; ++j)
    for (int jt = 0; jt < g.nt; ++jt) {
      const int jc = (g.nx[0] - j) % g.nx[0];
      const int jtc = (g.nt - jt) % g.nt;
      const cplx a = f.spectrum()[g.index(j, 0, jt)];
      const cplx b = std::conj(f.spectrum()[g.index(jc, 0, jtc)]);
      CHECK(std::abs(a - b) < 1e-9 * g.total());
    }
}

TEST_CASE("time shift: phase relation, identity, inverse") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  CHECK(rel_l2(time_shift(u, 0.0), u) < 1e-14);

  const double h = 0.37;
  const auto shifted = time_shift(u, h);
  for (int j = 0; j < g.nx[0]; ++j)
    for (int jt = 0; jt < g.nt; ++jt) {
      const cplx want = u.spectrum()[g.index(j, 0, jt)] *
                        std::exp(cplx(0.0, 2.0 * pi * g.sigma_of(jt) * h));
      CHECK(std::abs(shifted.spectrum()[g.index(j, 0, jt)] - want) < 1e-12 * g.total());
    }
  CHECK(rel_l2(time_shift(shifted, -h), u) < 1e-12);
}

TEST_CASE("heat semigroup: identity, constants, single modes") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  CHECK(rel_l2(heat_semigroup(u, 0.0), u) < 1e-14);

  const auto ones = SpaceTimeField::from_samples(g, std::vector<cplx>(g.total(), 1.0));
  CHECK(rel_l2(heat_semigroup(ones, 1.7), ones) < 1e-13);

  const auto m = testutil::single_mode(g, 2, -3);
  const double tau = 0.21;
  const auto out = heat_semigroup(m, tau);
  const double xi = 2.0 / g.lx[0], sigma = -3.0 / g.tspan;
  const cplx factor = std::exp(-tau * cplx(4.0 * pi * pi * xi * xi, 2.0 * pi * sigma));
  double worst = 0.0;
  for (int i = 0; i < g.total(); ++i)
    worst = std::max(worst, std::abs(out.samples()[i] - factor * m.samples()[i]));
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(heat_semigroup(u, -0.1), std::domain_error);
}

TEST_CASE("semigroup law and L2 contraction") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  const auto a = heat_semigroup(heat_semigroup(u, 0.13), 0.24);
  const auto b = heat_semigroup(u, 0.37);
  CHECK(rel_l2(a, b) < 1e-11);
  for (double tau : {0.01, 0.3, 2.0}) {
    CHECK(heat_semigroup(u, tau).l2_norm() <= u.l2_norm() * (1 + 1e-12));
    // sup contraction on real data
    CHECK(heat_semigroup(u, tau).linf_norm() <= u.linf_norm() * (1 + 1e-10));
  }
}

TEST_CASE("spectral and convolution semigroup agree on band-limited data") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);  // inner half of the mode range
  for (double tau : {0.05, 0.2}) {
    const auto a = heat_semigroup(u, tau);
    const auto b = semigroup_by_convolution(u, tau);
    CHECK(rel_l2(a, b) < 1e-8);
  }
}

TEST_CASE("band occupancy guard") {
  const auto g = grid64();
  CHECK(fhlab::fields::band_occupancy(testutil::five_mode_field(g)) <= 0.5);
  const auto hi = testutil::single_mode(g, 30, 0);
  CHECK(fhlab::fields::band_occupancy(hi) > 0.5);
}

TEST_CASE("sparse modes reproduce the field") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  const auto modes = sparse_modes(u);
  CHECK(modes.size() == 5);
  for (int j = 0; j < g.nx[0]; j += 7)
    for (int jt = 0; jt < g.nt; jt += 5) {
      const double x[2] = {g.x_of(0, j), 0.0};
      const cplx v = evaluate_modes(modes, x, 1, g.t_of(jt));
      CHECK(std::abs(v - u.samples()[g.index(j, 0, jt)]) < 1e-12);
    }
}

TEST_CASE("binary container round trip and csv dump") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  const auto path = std::filesystem::temp_directory_path() / "fhlab_io_test.fhfl";
  write_fhfl(path.string(), u);
  const auto v = read_fhfl(path.string());
  CHECK(v.grid() == g);
  CHECK(rel_l2(v, u) == 0.0);
  std::filesystem::remove(path);

  const auto csvp = std::filesystem::temp_directory_path() / "fhlab_io_test.csv";
  write_csv(csvp.string(), u);
  std::ifstream is(csvp);
  std::string header;
  std::getline(is, header);
  CHECK(header == "x0,x1,t,re,im");
  int lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  CHECK(lines == g.total());
  std::filesystem::remove(csvp);
}

TEST_CASE("transform size mismatches are structural errors") {
  const auto g = grid64();
  CHECK_THROWS_AS(dft_forward(g, std::vector<cplx>(7)), std::invalid_argument);
  CHECK_THROWS_AS(dft_inverse(g, std::vector<cplx>(g.total() - 1)), std::invalid_argument);
}
