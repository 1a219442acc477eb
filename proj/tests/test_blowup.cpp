#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "fhlab/blowup.hpp"
#include "fhlab/extension.hpp"

using namespace fhlab;
using namespace fhlab::blowup;
using evaluator::make_caloric2;
using evaluator::make_counterexample;
using evaluator::make_one;
using evaluator::make_poly2;
using evaluator::make_superposition;
using evaluator::make_x1;
using frequency::FrequencyEngine;
using std::numbers::pi;

TEST_CASE("parabolic dilation group law") {
  ParabolicDilation d1{0.5}, d2{3.0};
  const double x[1] = {0.7};
  double x1o[1], x2o[1], y1, y2, t1, t2;
  d1.apply(x, 0.4, -0.3, 1, x1o, y1, t1);
  d2.apply(x1o, y1, t1, 1, x2o, y2, t2);
  ParabolicDilation d12{1.5};
  double xo[1], yo, to;
  d12.apply(x, 0.4, -0.3, 1, xo, yo, to);
  CHECK(x2o[0] == doctest::Approx(xo[0]).epsilon(1e-15));
  CHECK(y2 == doctest::Approx(yo).epsilon(1e-15));
  CHECK(t2 == doctest::Approx(to).epsilon(1e-15));
}

TEST_CASE("rescaling normalization and frequency transport") {
  const double s = 0.6, a = 1.0 - 2.0 * s;
  FrequencyEngine e(1, a);
  auto sup = make_superposition({{1.0, make_x1()}, {0.1, make_poly2(1, a)}});
  for (double r : {0.1, 0.2, 0.4}) {
    const double H = e.averaged(*sup, nullptr, r).H;
    auto Ur = almgren_rescale(sup, r, H, a);
    CHECK(e.averaged(*Ur, nullptr, 1.0).H == doctest::Approx(1.0).epsilon(1e-8));
    for (double rho : {0.25, 0.5}) {
      const double lhs = e.averaged(*Ur, nullptr, rho).N1;
      const double rhs = e.averaged(*sup, nullptr, r * rho).N1;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(almgren_rescale(sup, 0.1, 0.0, a), std::domain_error);
}

TEST_CASE("homogeneous fields rescale to themselves") {
  FrequencyEngine e(1, 0.0);
  auto x1 = make_x1();
  const double H1 = e.averaged(*x1, nullptr, 0.1).H;
  const double H2 = e.averaged(*x1, nullptr, 0.4).H;
  auto Ua = almgren_rescale(x1, 0.1, H1, 0.0);
  auto Ub = almgren_rescale(x1, 0.4, H2, 0.0);
  auto diff = make_superposition({{1.0, Ua}, {-1.0, Ub}});
  CHECK(std::sqrt(std::max(0.0, e.averaged(*diff, nullptr, 1.0).H)) < 1e-8);
}

TEST_CASE("blowup sequence on homogeneous and perturbed fields") {
  FrequencyEngine e(1, 0.0);

  auto one = make_one();
  auto rep1 = blowup_sequence(one, nullptr, {0.4, 0.2, 0.1}, e);
  CHECK(rep1.kappa_hat == doctest::Approx(0.0).epsilon(1e-6));
  for (double d : rep1.distance) CHECK(d <= 1e-8);

  auto x1 = make_x1();
  auto rep2 = blowup_sequence(x1, nullptr, {0.4, 0.2, 0.1, 0.05}, e);
  CHECK(rep2.kappa_hat == doctest::Approx(0.5).epsilon(1e-6));
  for (double h : rep2.h_norm) CHECK(h == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(rep2.kappa_hat - rep2.n_smallest) < 1e-6);

  // perturbation dies out at small radii: fitted degree goes to the lowest
  // part, and along a geometric radius sequence the rescaling gaps decay
  auto sup = make_superposition({{1.0, make_x1()}, {0.1, make_poly2(1, 0.0)}});
  auto rep3 = blowup_sequence(sup, nullptr, {0.05, 0.035, 0.0245, 0.01715}, e, 4);
  CHECK(std::abs(rep3.kappa_hat - 0.5) < 5e-3);
  CHECK(std::abs(rep3.kappa_hat - rep3.n_smallest) < 1e-3);
  for (size_t j = 2; j < rep3.distance.size(); ++j)
    CHECK(rep3.distance[j] < rep3.distance[j - 1]);

  CHECK_THROWS_AS(blowup_sequence(x1, nullptr, {0.1, 0.2}, e), std::invalid_argument);
}

TEST_CASE("vanishing order of the reference fixtures") {
  // constant: order 0
  auto c = make_one();
  PointFn fc = [&](const double* x, double y, double t) { return c->value(x, y, t); };
  auto r0 = vanishing_order(fc, 1, false, {0.0, 0.0, 0.0}, -0.4, {0.4, 0.3, 0.2, 0.15, 0.1});
  CHECK(!r0.infinite);
  CHECK(std::abs(r0.fitted_order - 0.0) <= 0.05);

  // linear: order 1
  auto l = make_x1();
  PointFn fl = [&](const double* x, double y, double t) { return l->value(x, y, t); };
  auto r1 = vanishing_order(fl, 1, false, {0.0, 0.0, 0.0}, -0.4, {0.4, 0.3, 0.2, 0.15, 0.1});
  CHECK(std::abs(r1.fitted_order - 1.0) <= 0.05);

  // caloric quadratic: order 2, sup over the cylinder is 2 n r^2
  auto q = make_caloric2(1);
  PointFn fq = [&](const double* x, double y, double t) { return q->value(x, y, t); };
  auto r2 = vanishing_order(fq, 1, false, {0.0, 0.0, 0.0}, 0.0, {0.4, 0.3, 0.2, 0.15, 0.1});
  CHECK(std::abs(r2.fitted_order - 2.0) <= 0.05);
  CHECK(r2.sup.front() == doctest::Approx(2.0 * 0.4 * 0.4).epsilon(0.01));

  CHECK_THROWS_AS(vanishing_order(fq, 1, false, {0.0, 0.0, 0.0}, 0.0, {0.1}), std::invalid_argument);
}

TEST_CASE("flat counterexample: infinite order off-center, order one at the origin") {
  auto f = make_counterexample(1);
  PointFn pf = [&](const double* x, double y, double t) { return f->value(x, y, t); };
  // centered at (x,0,t), t < 0: flat in y
  auto off = vanishing_order(pf, 1, true, {0.3, 0.0, 0.0}, -0.5, {0.4, 0.3, 0.2, 0.15, 0.1});
  CHECK(off.infinite);
  // centered at the origin: parabolic degree one survives
  auto origin = vanishing_order(pf, 1, true, {0.0, 0.0, 0.0}, 0.0, {0.4, 0.3, 0.2, 0.15, 0.1});
  CHECK(!origin.infinite);
  CHECK(std::abs(origin.fitted_order - 1.0) <= 0.05);
}

TEST_CASE("vanishing order from a periodic boundary field") {
  const auto g = testutil::grid64();
  const auto u = testutil::five_mode_field(g);  // bounded away from zero: order 0
  auto rep = vanishing_order(u, {0.0, 0.0}, -0.2, {0.3, 0.2, 0.15, 0.1});
  CHECK(std::abs(rep.fitted_order) <= 0.05);
  CHECK_THROWS_AS(vanishing_order(u, {0.0, 0.0}, -0.9, {0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("height growth bound saturates for homogeneous fields") {
  FrequencyEngine e(1, 0.0);
  std::vector<double> rs = {0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  auto x1 = make_x1();
  auto curve = e.adjusted_frequency_curve(*x1, nullptr, rs, 0.0, false);
  auto v = nondegeneracy_check(curve, 0.5, 0.0);
  CHECK(v.holds);
  CHECK(std::abs(v.min_slack) <= 1e-6);  // equality case
  CHECK(v.nbar == doctest::Approx(0.5).epsilon(1e-8));

  // constants: exponent a with positive slack at interior radii
  const double a = -0.4;
  FrequencyEngine ea(1, a);
  auto curve1 = ea.adjusted_frequency_curve(*make_one(), nullptr, rs, 0.0, false);
  auto v1 = nondegeneracy_check(curve1, 0.5, a);
  CHECK(v1.holds);
  for (double h : curve1.H) CHECK(h > 0.0);
}

TEST_CASE("harnack quotient experiment") {
  const auto g = testutil::grid64();
  const fracheat::FracConfig fc{0.5};

  // u == 1, V = psi = 0: the quotient is exactly one at every radius
  const auto ones =
      fields::SpaceTimeField::from_samples(g, std::vector<fields::cplx>(g.total(), {1.0, 0.0}));
  const auto zero = fields::SpaceTimeField::zero(g);
  auto rep = harnack_quotient(ones, zero, zero, fc, {0.1, 0.2, 0.4});
  for (double q : rep.quotient) CHECK(q == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.spread <= 1e-10);

  // psi-shift on the trivial pair: the quotient is non-increasing in the shift
  double prev = std::numeric_limits<double>::infinity();
  for (double shift : {0.0, 0.5, 1.0, 2.0}) {
    const auto psi = fields::SpaceTimeField::from_samples(
        g, std::vector<fields::cplx>(g.total(), {shift, 0.0}));
    std::vector<fields::cplx> vsamp(g.total());
    for (int i = 0; i < g.total(); ++i) vsamp[i] = -shift;  // keeps H^s u = V u + psi exact
    const auto V = fields::SpaceTimeField::from_samples(g, std::move(vsamp));
    auto r = harnack_quotient(ones, V, psi, fc, {0.2});
    CHECK(r.quotient[0] <= prev + 1e-12);
    prev = r.quotient[0];
  }

  // manufactured positive pair (2 + cosine): finite quotient, moderate drift
  std::vector<fields::cplx> usp(g.total(), 0.0);
  testutil::put_mode(g, usp, 0, 0, 0, {2.0, 0.0});
  testutil::put_mode(g, usp, 1, 0, 0, {0.5, 0.0});
  testutil::put_mode(g, usp, -1, 0, 0, {0.5, 0.0});
  const auto u = fields::SpaceTimeField::from_spectrum(g, std::move(usp));
  const auto pot = fracheat::manufactured_potential(u, fc, 0.1 * u.linf_norm());
  std::vector<fields::cplx> vs = pot.v.samples();
  for (auto& cv : vs) cv *= fc.c_s();  // V in the H^s u = V u + psi normalization
  const auto V = fields::SpaceTimeField::from_samples(g, std::move(vs));
  const auto psi = fields::SpaceTimeField::zero(g);
  auto rep2 = harnack_quotient(u, V, psi, fc, {0.1, 0.2, 0.4});
  for (double q : rep2.quotient) {
    CHECK(std::isfinite(q));
    CHECK(q >= 1.0 - 1e-10);
  }
  CHECK(rep2.spread <= 0.25);

  // negativity is a precondition error
  std::vector<fields::cplx> neg(g.total(), {1.0, 0.0});
  neg[0] = {-0.2, 0.0};
  const auto bad = fields::SpaceTimeField::from_samples(g, std::move(neg));
  CHECK_THROWS_AS(harnack_quotient(bad, zero, zero, fc, {0.1}), std::domain_error);
}

TEST_CASE("rescaled Neumann coupling carries the expected power") {
  // flux of U_r at the boundary must equal r^(2s) W(rx, r^2 t) U_r(x,0,t)
  const auto g = testutil::grid64();
  const double s = 0.7;
  const fracheat::FracConfig fc{s};
  const auto u = testutil::five_mode_field(g);
  const auto ext = std::make_shared<extension::ExtensionField>(u, fc, extension::YGrid::geometric());
  const auto hsu = fracheat::frac_heat_multiplier(u, fc);
  const auto hmodes = fields::sparse_modes(hsu);
  const auto umodes = fields::sparse_modes(u);

  const double r = 0.35;
  frequency::FrequencyEngine e(1, fc.a());
  const double H = e.averaged(*ext, nullptr, r).H;
  auto Ur = almgren_rescale(ext, r, H, fc.a());

  const double x[2] = {0.4, 0.0};
  const double t = -0.5;
  // flux limit of the rescaled field from small-y samples, removing the
  // known boundary powers {y^p, y^2p} with p = 2 - 2s
  const double p = 2.0 - 2.0 * s;
  const double ys[3] = {1e-5, 2e-5, 4e-5};
  double m[3][3], rhs[3];
  for (int i = 0; i < 3; ++i) {
    m[i][0] = 1.0;
    m[i][1] = std::pow(ys[i], p);
    m[i][2] = std::pow(ys[i], 2.0 * p);
    rhs[i] = std::pow(ys[i], fc.a()) * Ur->jet(x, ys[i], t).uy;
  }
  for (int c = 0; c < 2; ++c)
    for (int rrow = c + 1; rrow < 3; ++rrow) {
      const double f = m[rrow][c] / m[c][c];
      for (int k = c; k < 3; ++k) m[rrow][k] -= f * m[c][k];
      rhs[rrow] -= f * rhs[c];
    }
  const double c2 = rhs[2] / m[2][2];
  const double c1 = (rhs[1] - m[1][2] * c2) / m[1][1];
  const double limit = rhs[0] - m[0][1] * c1 - m[0][2] * c2;
  // W(rx, r^2 t) U_r(x, 0, t) with W = c_s H^s u / u
  const double xr[2] = {r * x[0], 0.0};
  const double tr = r * r * t;
  const double W = fc.c_s() * fields::evaluate_modes(hmodes, xr, 1, tr).real() /
                   fields::evaluate_modes(umodes, xr, 1, tr).real();
  const double want = -std::pow(r, 2.0 * s) * W * Ur->value(x, 0.0, t);
  CHECK(limit == doctest::Approx(want).epsilon(1e-7));
}
