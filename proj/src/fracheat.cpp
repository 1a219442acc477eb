#include "fhlab/fracheat.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fhlab/quadrature.hpp"
#include "fhlab/specfun.hpp"

namespace fhlab::fracheat {

namespace {
constexpr double kPi = std::numbers::pi;

cplx pow_principal(cplx w, double p) {
  if (w == cplx(0.0)) return 0.0;
  return std::exp(p * std::log(w));
}

cplx mode_lambda(const fields::SpaceTimeGrid& g, int j0, int j1, int jt) {
  double xi2 = g.xi_of(0, j0) * g.xi_of(0, j0);
  if (g.dim == 2) xi2 += g.xi_of(1, j1) * g.xi_of(1, j1);
  return cplx(4.0 * kPi * kPi * xi2, 2.0 * kPi * g.sigma_of(jt));
}

template <typename SymbolFn>
SpaceTimeField apply_symbol(const SpaceTimeField& u, SymbolFn&& sym) {
  const auto& g = u.grid();
  std::vector<cplx> sp = u.spectrum();
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt) {
        const int idx = g.index(j0, j1, jt);
        if (sp[idx] != cplx(0.0)) sp[idx] *= sym(mode_lambda(g, j0, j1, jt));
      }
  return SpaceTimeField::from_spectrum(g, std::move(sp));
}

}  // namespace

double FracConfig::c_s() const {
  validate();
  return specfun::gamma_pos(1.0 - s) /
         (std::pow(2.0, 2.0 * s - 1.0) * specfun::gamma_pos(s));
}

void FracConfig::validate() const {
  if (!(s > 0.0) || !(s < 1.0)) throw std::domain_error("FracConfig: s must lie in (0,1)");
}

SpaceTimeField frac_heat_multiplier(const SpaceTimeField& u, const FracConfig& cfg) {
  cfg.validate();
  return apply_symbol(u, [&](cplx lam) { return pow_principal(lam, cfg.s); });
}

cplx balakrishnan_symbol(cplx lambda, double s, const BalakrishnanQuad& quad) {
  using std::exp;
  if (lambda == cplx(0.0)) return 0.0;
  const double gamma1ms = specfun::gamma_pos(1.0 - s);

  // Rescale tau -> tau/|lambda| first: the integral is homogeneous of
  // degree s, so it suffices to treat the unit-modulus symbol mu. The
  // split at tau* then sits at the natural scale of the integrand for
  // every mode at once; a split fixed in absolute tau cannot resolve both
  // the lowest and highest grid symbols with one rule.
  const double alam = std::abs(lambda);
  const cplx mu = lambda / alam;
  const double tstar = quad.split;

  // Singular part: int_0^t* tau^(-s-1) (e^{-mu tau} - 1 + mu tau) dtau with
  // the subtracted linear term restored in closed form. The remaining
  // integrand is tau^(1-s) times an analytic factor, matched by a
  // Gauss-Jacobi rule with endpoint exponent 1-s.
  static thread_local int cached_nodes = -1;
  static thread_local double cached_s = -1.0;
  static thread_local quad::Rule1D jac;
  if (cached_nodes != quad.singular_nodes || cached_s != s) {
    jac = quad::gauss_jacobi01(quad.singular_nodes, 1.0 - s);
    cached_nodes = quad.singular_nodes;
    cached_s = s;
  }
  cplx singular = 0.0;
  for (int i = 0; i < jac.size(); ++i) {
    const cplx w = mu * (tstar * jac.x[i]);
    // (e^{-w} - 1 + w)/x^2, stable for small |w| via series
    cplx val;
    if (std::abs(w) < 1e-4) {
      val = w * w * (0.5 - w / 6.0 + w * w / 24.0);
    } else {
      val = exp(-w) - 1.0 + w;
    }
    singular += jac.w[i] * val / (jac.x[i] * jac.x[i]);
  }
  singular *= std::pow(tstar, 1.0 - s);
  singular -= mu * std::pow(tstar, 1.0 - s) / (1.0 - s);

  // Tail: int_t*^inf tau^(-s-1) e^{-mu tau} dtau - t*^(-s)/s, evaluated on
  // the contour tau = t* + e^{i phi} v with phi = -arg(mu), which turns the
  // exponential into plain e^{-v} along real Gauss-Laguerre nodes.
  static thread_local int cached_tail = -1;
  static thread_local quad::Rule1D lag;
  if (cached_tail != quad.tail_nodes) {
    lag = quad::gauss_laguerre(quad.tail_nodes);
    cached_tail = quad.tail_nodes;
  }
  const cplx eiphi = std::conj(mu);  // |mu| = 1
  cplx tail = 0.0;
  for (int i = 0; i < lag.size(); ++i) {
    const cplx tau = tstar + eiphi * lag.x[i];
    tail += lag.w[i] * pow_principal(tau, -s - 1.0);
  }
  tail *= eiphi * exp(-mu * tstar);
  tail -= std::pow(tstar, -s) / s;

  return -(s / gamma1ms) * std::pow(alam, s) * (singular + tail);
}

SpaceTimeField frac_heat_balakrishnan(const SpaceTimeField& u, const FracConfig& cfg,
                                      const BalakrishnanQuad& quad) {
  cfg.validate();
  // convergence sentinel on the singular part: the rule at half resolution
  // must agree, otherwise the quadrature is deemed divergent for this grid
  BalakrishnanQuad half = quad;
  half.singular_nodes = std::max(12, quad.singular_nodes / 2);
  const cplx probe = balakrishnan_symbol(cplx(1.0, 0.0), cfg.s, quad);
  const cplx probe_half = balakrishnan_symbol(cplx(1.0, 0.0), cfg.s, half);
  if (std::abs(probe - probe_half) > 1e-8 * std::abs(probe))
    throw std::runtime_error("frac_heat_balakrishnan: singular-part quadrature did not converge");
  return apply_symbol(u, [&](cplx lam) { return balakrishnan_symbol(lam, cfg.s, quad); });
}

double parabolic_sobolev_norm(const SpaceTimeField& u, const FracConfig& cfg) {
  cfg.validate();
  const auto& g = u.grid();
  double meas = g.tspan;
  for (int a = 0; a < g.dim; ++a) meas *= g.lx[a];
  const double scale = 1.0 / g.total();
  double acc = 0.0;
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt) {
        const cplx c = u.spectrum()[g.index(j0, j1, jt)] * scale;
        if (c == cplx(0.0)) continue;
        const double l2 = std::abs(mode_lambda(g, j0, j1, jt));  // |L|^2
        acc += std::pow(1.0 + l2, 2.0 * cfg.s) * std::norm(c);
      }
  return std::sqrt(meas * acc);
}

PotentialField manufactured_potential(const SpaceTimeField& u, const FracConfig& cfg,
                                      double floor) {
  cfg.validate();
  if (!(floor > 0.0)) throw std::domain_error("manufactured_potential: floor must be positive");
  const auto& g = u.grid();
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt) {
        const cplx val = u.samples()[g.index(j0, j1, jt)];
        if (std::abs(val) < floor)
          throw std::domain_error(
              "manufactured_potential: |u| = " + std::to_string(std::abs(val)) +
              " < floor at grid node (x0=" + std::to_string(g.x_of(0, j0)) +
              ", x1=" + std::to_string(g.dim == 2 ? g.x_of(1, j1) : 0.0) +
              ", t=" + std::to_string(g.t_of(jt)) + ")");
      }
  const SpaceTimeField hsu = frac_heat_multiplier(u, cfg);
  const double cs = cfg.c_s();
  std::vector<cplx> v(g.total());
  for (int i = 0; i < g.total(); ++i) v[i] = hsu.samples()[i] / (cs * u.samples()[i]);
  PotentialField out{SpaceTimeField::from_samples(g, std::move(v)), 0.0, 0.0};
  out.bound = out.v.linf_norm();
  // gradient diagnostic from the interpolant spectrum
  std::vector<cplx> gx = out.v.spectrum();
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt)
        gx[g.index(j0, j1, jt)] *= cplx(0.0, 2.0 * kPi * g.xi_of(0, j0));
  out.grad_bound = SpaceTimeField::from_spectrum(g, std::move(gx)).linf_norm();
  return out;
}

}  // namespace fhlab::fracheat
