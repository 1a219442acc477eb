#include "fhlab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fhlab::blowup {

namespace {

double log_slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(xs.size());
  for (int i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

EvalPtr almgren_rescale(EvalPtr base, double r, double H_r, double a) {
  if (!(H_r > 0.0)) throw std::domain_error("almgren_rescale: H(U,r) must be positive");
  return evaluator::make_rescaled(std::move(base), r, std::pow(r, a / 2.0) / std::sqrt(H_r));
}

BlowupReport blowup_sequence(const EvalPtr& U, const frequency::BoundaryDensity* bdry,
                             std::vector<double> r_list, const FrequencyEngine& engine,
                             int fit_window) {
  if (r_list.size() < 2) throw std::invalid_argument("blowup_sequence: need at least two radii");
  for (size_t j = 1; j < r_list.size(); ++j)
    if (!(r_list[j] < r_list[j - 1]))
      throw std::invalid_argument("blowup_sequence: radii must decrease");
  const double a = engine.weight_exponent();
  BlowupReport rep;
  EvalPtr prev;
  for (double r : r_list) {
    const auto f = engine.averaged(*U, bdry, r);
    if (!(f.H > 0.0)) throw std::domain_error("blowup_sequence: degenerate H(U,r)");
    EvalPtr Ur = almgren_rescale(U, r, f.H, a);
    rep.r.push_back(r);
    rep.H.push_back(f.H);
    rep.h_norm.push_back(engine.averaged(*Ur, nullptr, 1.0).H);
    if (prev) {
      const auto diff = evaluator::make_superposition({{1.0, Ur}, {-1.0, prev}});
      rep.distance.push_back(std::sqrt(std::max(0.0, engine.averaged(*diff, nullptr, 1.0).H)));
    } else {
      rep.distance.push_back(0.0);
    }
    prev = Ur;
  }
  for (size_t j = 0; j < rep.r.size(); ++j) {
    if (j == 0) {
      rep.kappa_running.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      const double slope = (std::log(rep.H[j - 1]) - std::log(rep.H[j])) /
                           (std::log(rep.r[j - 1]) - std::log(rep.r[j]));
      rep.kappa_running.push_back((slope - a) / 4.0);
    }
  }
  // power-law fit over the smallest radii
  std::vector<double> lx, ly;
  const int m = static_cast<int>(rep.r.size());
  for (int j = std::max(0, m - fit_window); j < m; ++j) {
    lx.push_back(std::log(rep.r[j]));
    ly.push_back(std::log(rep.H[j]));
  }
  rep.kappa_hat = (log_slope_fit(lx, ly) - a) / 4.0;
  rep.n_smallest = engine.averaged(*U, bdry, r_list.back()).N;
  return rep;
}

double cylinder_sup(const PointFn& f, int n, bool thick, const std::array<double, 3>& X0,
                    double t0, double r, int density) {
  if (density < 2) throw std::invalid_argument("cylinder_sup: empty sample lattice");
  const auto pass = [&](int d) {
    double best = 0.0;
    const int dy = thick ? d : 1;
    for (int it = 0; it <= d; ++it) {
      const double t = t0 - r * r * it / d;
      for (int iy = 0; iy < dy; ++iy) {
        for (int i0 = 0; i0 <= d; ++i0) {
          for (int i1 = 0; i1 <= (n == 2 ? d : 0); ++i1) {
            double x[2] = {X0[0] - r + 2.0 * r * i0 / d,
                           n == 2 ? X0[1] - r + 2.0 * r * i1 / d : 0.0};
            double y = X0[2];
            if (thick) y = std::max(0.0, X0[2] - r) + (X0[2] + r - std::max(0.0, X0[2] - r)) * iy / (dy - 1.0);
            // keep only points inside the ball
            double q = y - X0[2];
            double dist2 = q * q;
            for (int ax = 0; ax < n; ++ax) {
              const double dxa = x[ax] - X0[ax];
              dist2 += dxa * dxa;
            }
            if (dist2 > r * r * (1.0 + 1e-12)) continue;
            best = std::max(best, std::abs(f(x, y, t)));
          }
        }
      }
    }
    return best;
  };
  const double coarse = pass(density);
  const double fine = pass(2 * density);
  // one Richardson-style refinement of the running max
  return fine + (fine - coarse);
}

VanishingOrderReport vanishing_order(const PointFn& f, int n, bool thick,
                                     const std::array<double, 3>& center, double t0,
                                     std::vector<double> r_list, double floor,
                                     double order_cap) {
  if (r_list.size() < 2) throw std::invalid_argument("vanishing_order: need at least two radii");
  VanishingOrderReport rep;
  for (double r : r_list) {
    rep.r.push_back(r);
    rep.sup.push_back(cylinder_sup(f, n, thick, center, t0, r));
  }
  rep.local_slope.push_back(std::numeric_limits<double>::quiet_NaN());
  for (size_t j = 1; j < rep.r.size(); ++j) {
    const double su = std::max(rep.sup[j], floor);
    const double sp = std::max(rep.sup[j - 1], floor);
    rep.local_slope.push_back((std::log(sp) - std::log(su)) /
                              (std::log(rep.r[j - 1]) - std::log(rep.r[j])));
  }
  // infinite order: the sup hits the floor at the small end, or the fitted
  // slope exceeds every order we test for
  std::vector<double> lx, ly;
  for (size_t j = 0; j < rep.r.size(); ++j) {
    lx.push_back(std::log(rep.r[j]));
    ly.push_back(std::log(std::max(rep.sup[j], floor)));
  }
  rep.fitted_order = log_slope_fit(lx, ly);
  rep.infinite = rep.sup.back() <= floor || rep.fitted_order > order_cap;
  return rep;
}

VanishingOrderReport vanishing_order(const SpaceTimeField& u, const std::array<double, 2>& x0,
                                     double t0, std::vector<double> r_list, double floor) {
  const auto& g = u.grid();
  const double rmax = *std::max_element(r_list.begin(), r_list.end());
  if (t0 - rmax * rmax < -g.tspan || t0 > 0.0)
    throw std::invalid_argument("vanishing_order: cylinder leaves the time window");
  const auto modes = fields::sparse_modes(u, 1e-15);
  const int n = g.dim;
  PointFn f = [modes, n](const double* x, double, double t) {
    return fields::evaluate_modes(modes, x, n, t).real();
  };
  return vanishing_order(f, n, false, {x0[0], x0[1], 0.0}, t0, std::move(r_list), floor);
}

NondegeneracyVerdict nondegeneracy_check(const frequency::FrequencyCurve& curve, double r0,
                                         double a, double tol) {
  NondegeneracyVerdict v;
  if (curve.r.empty()) throw std::invalid_argument("nondegeneracy_check: empty curve");
  double nbar = 0.0;
  for (size_t j = 0; j < curve.adjusted.size(); ++j)
    if (std::isfinite(curve.adjusted[j])) nbar = std::max(nbar, curve.adjusted[j]);
  v.nbar = nbar;
  // locate H(r0): nearest sample
  size_t j0 = 0;
  for (size_t j = 0; j < curve.r.size(); ++j)
    if (std::abs(curve.r[j] - r0) < std::abs(curve.r[j0] - r0)) j0 = j;
  const double H0 = curve.H[j0];
  const double expo = 4.0 * nbar + a;
  v.min_slack = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < curve.r.size(); ++j) {
    if (!(curve.H[j] > 0.0)) {
      v.min_slack = -std::numeric_limits<double>::infinity();
      break;
    }
    const double slack =
        std::log(curve.H[j]) - (std::log(H0) + expo * std::log(curve.r[j] / curve.r[j0]));
    v.min_slack = std::min(v.min_slack, slack);
  }
  v.holds = v.min_slack >= -tol;
  return v;
}

HarnackReport harnack_quotient(const SpaceTimeField& u, const SpaceTimeField& V,
                               const SpaceTimeField& psi, const FracConfig& cfg,
                               const std::vector<double>& rs) {
  const auto& g = u.grid();
  for (const auto& c : u.samples())
    if (c.real() < -1e-12 || std::abs(c.imag()) > 1e-10)
      throw std::domain_error("harnack_quotient: u must be real and nonnegative");

  // consistency: H^s u = V u + psi on the grid
  const SpaceTimeField hsu = fracheat::frac_heat_multiplier(u, cfg);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.total(); ++i) {
    const auto r = hsu.samples()[i] - (V.samples()[i] * u.samples()[i] + psi.samples()[i]);
    num += std::norm(r);
    den += std::norm(hsu.samples()[i]);
  }
  HarnackReport rep;
  rep.consistency_resid = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  if (rep.consistency_resid > 1e-6)
    throw std::domain_error("harnack_quotient: (u,V,psi) are not a solution triple");

  const auto umodes = fields::sparse_modes(u, 1e-15);
  const auto psimodes = fields::sparse_modes(psi, 1e-15);
  const int n = g.dim;
  const auto uval = [&](const double* x, double t) {
    return fields::evaluate_modes(umodes, x, n, t).real();
  };
  const auto psival = [&](const double* x, double t) {
    return std::abs(fields::evaluate_modes(psimodes, x, n, t).real());
  };

  const auto region_extreme = [&](double rad, double tlo, double thi, bool want_sup,
                                  const std::function<double(const double*, double)>& fn) {
    const int d = 28;
    double best = want_sup ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    for (int it = 0; it <= d; ++it) {
      const double t = tlo + (thi - tlo) * it / d;
      for (int i0 = 0; i0 <= d; ++i0)
        for (int i1 = 0; i1 <= (n == 2 ? d : 0); ++i1) {
          double x[2] = {-rad + 2.0 * rad * i0 / d, n == 2 ? -rad + 2.0 * rad * i1 / d : 0.0};
          double r2 = x[0] * x[0] + (n == 2 ? x[1] * x[1] : 0.0);
          if (r2 > rad * rad * (1 + 1e-12)) continue;
          const double v = fn(x, t);
          best = want_sup ? std::max(best, v) : std::min(best, v);
        }
    }
    return best;
  };

  for (double r : rs) {
    if (!(2.0 * r * r < g.tspan))
      throw std::invalid_argument("harnack_quotient: radius leaves the time window");
    const double sup = region_extreme(r, -r * r, -r * r / 2.0, true, uval);
    const double inf = region_extreme(r, -r * r / 4.0, -1e-9, false, uval);
    const double pn = region_extreme(2.0 * r, -2.0 * r * r, -1e-9, true, psival);
    rep.psi_norm = std::max(rep.psi_norm, pn);
    rep.r.push_back(r);
    rep.quotient.push_back(sup / (inf + std::pow(r, 2.0 * cfg.s) * pn));
  }
  double lo = *std::min_element(rep.quotient.begin(), rep.quotient.end());
  double hi = *std::max_element(rep.quotient.begin(), rep.quotient.end());
  rep.spread = (hi - lo) / (0.5 * (hi + lo));
  return rep;
}

}  // namespace fhlab::blowup
