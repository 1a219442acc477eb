#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "common.hpp"
#include "fhlab/extension.hpp"
#include "fhlab/frequency.hpp"

using namespace fhlab::extension;
using fhlab::fields::cplx;
using fhlab::fields::SpaceTimeField;
using fhlab::fracheat::FracConfig;
using testutil::grid64;
using testutil::rel_l2;
using std::numbers::pi;

TEST_CASE("y grid construction and validation") {
  const auto y = YGrid::geometric();
  CHECK(y.nodes.size() == 64);
  CHECK(y.nodes.front() == doctest::Approx(1e-4));
  CHECK(y.nodes.back() == doctest::Approx(12.0));
  const double ratio = y.nodes[1] / y.nodes[0];
  CHECK(ratio == doctest::Approx(1.2).epsilon(0.02));
  YGrid bad;
  bad.nodes = {0.01, 0.02, 0.03, 0.1, 0.5, 1.0, 4.0, 9.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // first node too large
}

TEST_CASE("constants extend as constants") {
  const auto g = grid64();
  const auto ones = SpaceTimeField::from_samples(
      g, std::vector<cplx>(g.total(), {1.0, 0.0}));
  const ExtensionField ext(ones, FracConfig{0.37}, YGrid::geometric());
  for (double y : {0.0, 0.3, 2.0, 11.0}) {
    double x[2] = {0.7, 0.0};
    CHECK(ext.value(x, y, -0.5) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("half order has the exponential profile") {
  auto g = grid64();
  const auto m = testutil::single_mode(g, 1, 0);
  const ExtensionField ext(m, FracConfig{0.5}, YGrid::geometric());
  const double xi = 1.0 / g.lx[0];
  const double L = 2.0 * pi * xi;
  for (double y : {0.1, 0.7, 2.3}) {
    double x[2] = {0.3, 0.0};
    const cplx want = std::exp(cplx(0.0, 2.0 * pi * xi * x[0])) * std::exp(-L * y);
    const cplx got = ext.value_c(x, y, -0.4);
    CHECK(std::abs(got - want) < 1e-12 * std::abs(want));
  }
}

TEST_CASE("boundary recovery rate is the expected power") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  for (double s : {0.3, 0.7}) {
    const ExtensionField ext(u, FracConfig{s}, YGrid::geometric());
    double x[2] = {0.453, 0.0};
    const double t = -0.37;
    const double u0 = ext.value(x, 0.0, t);
    // fit |U(y)-u| ~ y^(2s) over the smallest grid nodes
    std::vector<double> lys, les;
    for (int k = 0; k < 6; ++k) {
      const double y = ext.ygrid().nodes[k];
      const double err = std::abs(ext.value(x, y, t) - u0);
      lys.push_back(std::log(y));
      les.push_back(std::log(err));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lys.size(); ++i) {
      sx += lys[i];
      sy += les[i];
      sxx += lys[i] * lys[i];
      sxy += lys[i] * les[i];
    }
    const int mn = static_cast<int>(lys.size());
    const double slope = (mn * sxy - sx * sy) / (mn * sxx - sx * sx);
    CHECK(slope == doctest::Approx(2.0 * s).epsilon(0.05));
  }
}

TEST_CASE("extension is linear in the boundary datum") {
  const auto g = grid64();
  const FracConfig fc{0.66};
  const auto u = testutil::five_mode_field(g);
  const auto v = testutil::single_mode(g, 2, -1, {0.5, 0.1});
  std::vector<cplx> mix(g.total());
  for (int i = 0; i < g.total(); ++i) mix[i] = u.samples()[i] + 2.0 * v.samples()[i];
  const ExtensionField ea(u, fc, YGrid::geometric());
  const ExtensionField eb(v, fc, YGrid::geometric());
  const ExtensionField em(SpaceTimeField::from_samples(g, std::move(mix)), fc, YGrid::geometric());
  double x[2] = {1.21, 0.0};
  for (double y : {0.05, 0.9}) {
    const cplx lhs = em.value_c(x, y, -0.62);
    const cplx rhs = ea.value_c(x, y, -0.62) + 2.0 * eb.value_c(x, y, -0.62);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("weighted Neumann trace equals the fractional operator") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  for (double s : {0.25, 0.5, 0.75}) {
    const FracConfig fc{s};
    const auto ext = extend(u, fc, YGrid::geometric());
    const auto neu = neumann_trace(ext);
    CHECK(rel_l2(neu.trace, fhlab::fracheat::frac_heat_multiplier(u, fc)) < 1e-8);
    CHECK(neu.grid_spectral_discrepancy < 1e-8);
  }
  // trivial boundary data
  const auto ones = SpaceTimeField::from_samples(g, std::vector<cplx>(g.total(), {1.0, 0.0}));
  CHECK(neumann_trace(extend(ones, FracConfig{0.4}, YGrid::geometric())).trace.l2_norm() < 1e-13);
}

TEST_CASE("Neumann constant at order one half") {
  // single mode with L = 1 exactly: lx = 2 pi, k = 1, sigma = 0;
  // the raw weighted limit is -hat u
  auto g = grid64();
  g.lx = {2.0 * pi, 2.0 * pi};
  const auto m = testutil::single_mode(g, 1, 0, {0.8, -0.3});
  const FracConfig fc{0.5};
  const ExtensionField ext(m, fc, YGrid::geometric());
  // fit the limit of y^a dU^/dy from small nodes via the mode profile
  const cplx coeff = fhlab::fields::sparse_modes(m)[0].coeff;
  const double y = 1e-4;
  const cplx flux = std::pow(y, fc.a()) * coeff * ext.mode_profile_dy(0, y);
  CHECK(std::abs(flux - (-coeff)) < 5e-4 * std::abs(coeff));  // raw small-y value
  const auto neu = neumann_trace(ext);
  // and the trace equals L^{2s} hat u = hat u
  CHECK(rel_l2(neu.trace, m) < 1e-10);
}

TEST_CASE("interior residual vanishes for trivial profiles and converges at order two") {
  const auto g = grid64();
  const FracConfig fc{0.65};
  Box box;
  box.x0 = {0.1, 0.9};
  box.x1 = {0.1, 0.9};
  box.y = {0.5, 1.4};
  box.t = {-0.7, -0.3};

  const auto ones = SpaceTimeField::from_samples(g, std::vector<cplx>(g.total(), {1.0, 0.0}));
  const ExtensionField e1(ones, fc, YGrid::geometric());
  CHECK(pde_residual(e1, fc.a(), box, 0.02) < 1e-12);

  const auto u = testutil::five_mode_field(g);
  const ExtensionField e2(u, fc, YGrid::geometric());
  const auto ro = pde_residual_order(e2, fc.a(), box, 0.02);
  CHECK(!ro.exact);
  CHECK(ro.order == doctest::Approx(2.0).epsilon(0.1));

  Box bad = box;
  bad.y = {0.005, 0.5};
  CHECK_THROWS_AS(pde_residual(e2, fc.a(), bad, 0.02), std::invalid_argument);
}

TEST_CASE("subordination route matches the profile route") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  const std::vector<Probe> probes = {{{0.1, 0.0}, 0.2, -0.2},
                                     {{0.9, 0.0}, 0.5, -0.45},
                                     {{0.0, 0.0}, 1.0, -0.3},
                                     {{1.5, 0.0}, 2.0, -0.8}};
  for (double s : {0.25, 0.5, 0.75}) CHECK(poisson_check(u, FracConfig{s}, probes) < 1e-7);

  const auto ones = SpaceTimeField::from_samples(g, std::vector<cplx>(g.total(), {1.0, 0.0}));
  CHECK(poisson_check(ones, FracConfig{0.6}, probes) < 1e-12);
}

TEST_CASE("weighted gradient energy on the strip is mesh stable") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  const FracConfig fc{0.7};
  const ExtensionField ext(u, fc, YGrid::geometric());
  const double r = 0.5;
  fhlab::frequency::FrequencyEngine e1(1, fc.a(), {40, 120, 72});
  fhlab::frequency::FrequencyEngine e2(1, fc.a(), {56, 160, 104});
  const auto f1 = e1.averaged(ext, nullptr, r);
  const auto f2 = e2.averaged(ext, nullptr, r);
  const double v1 = f1.N1 * f1.H, v2 = f2.N1 * f2.H;  // strip gradient integral / r^2
  CHECK(std::isfinite(v1));
  CHECK(std::abs(v1 - v2) <= 0.02 * std::abs(v2));
}

TEST_CASE("decay bound of the y derivative near the boundary") {
  const auto g = grid64();
  const auto u = testutil::five_mode_field(g);
  for (double s : {0.3, 0.5, 0.8}) {
    const FracConfig fc{s};
    const ExtensionField ext(u, fc, YGrid::geometric());
    double bound = 0.0;
    for (double y : ext.ygrid().nodes) {
      if (y > 1.0) break;
      double m = 0.0;
      for (int j = 0; j < g.nx[0]; j += 8)
        for (int jt = 0; jt < g.nt; jt += 8) {
          double x[2] = {g.x_of(0, j), 0.0};
          m = std::max(m, std::abs(ext.jet(x, y, g.t_of(jt)).uy));
        }
      bound = std::max(bound, std::pow(y, 1.0 - 2.0 * s) * m);
    }
    CHECK(std::isfinite(bound));
    CHECK(bound < 1e3);  // uniformly bounded, reported scale
  }
}

TEST_CASE("snapshot export round trip") {
  auto g = testutil::grid64();
  g.nx = {8, 1};
  g.nt = 8;
  const auto u = testutil::single_mode(g, 1, 0, {0.3, 0.0});
  const ExtensionField ext(u, FracConfig{0.5}, YGrid::geometric(16, 1e-4, 9.0));
  const auto path = std::filesystem::temp_directory_path() / "fhlab_snapshot.fhfl";
  write_snapshot(path.string(), ext);
  const auto snap = read_snapshot(path.string());
  CHECK(snap.grid == g);
  CHECK(snap.yaxis == ext.ygrid().nodes);
  CHECK(snap.values.size() == ext.samples().size());
  // spot value: snapshot layout is x-major, then y, then t
  const int jy = 7, j0 = 3, jt = 5;
  const size_t idx = (static_cast<size_t>(j0) * snap.yaxis.size() + jy) * g.nt + jt;
  double x[2] = {g.x_of(0, j0), 0.0};
  CHECK(snap.values[idx] ==
        doctest::Approx(ext.value(x, snap.yaxis[jy], g.t_of(jt))).epsilon(1e-12));
  // a snapshot is not a plain field
  CHECK_THROWS_AS(fhlab::fields::read_fhfl(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("spec errors carry the mode index") {
  const auto g = grid64();
  const auto m = testutil::single_mode(g, 1, 0);
  const ExtensionField ext(m, FracConfig{0.5}, YGrid::geometric());
  CHECK_THROWS_WITH_AS(ext.mode_profile(0, -1.0), doctest::Contains("mode 0"),
                       std::domain_error);
}
