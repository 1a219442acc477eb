#include "fhlab/frequency.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fhlab::frequency {

namespace {
constexpr double kPi = std::numbers::pi;
}

double BackwardGaussian::value(const double* x, double y, double t) const {
  return g_factor(x, t) * k_factor(y, t);
}

double BackwardGaussian::g_factor(const double* x, double t) const {
  const double tau = center_t - t;
  if (!(tau > 0.0)) throw std::domain_error("BackwardGaussian: needs t < center_t");
  double q = 0.0;
  for (int a = 0; a < n; ++a) {
    const double d = x[a] - center_x[a];
    q += d * d;
  }
  return std::pow(4.0 * kPi * tau, -0.5 * n) * std::exp(-q / (4.0 * tau));
}

double BackwardGaussian::k_factor(double y, double t) const {
  const double tau = center_t - t;
  if (!(tau > 0.0)) throw std::domain_error("BackwardGaussian: needs t < center_t");
  return std::pow(4.0 * kPi * tau, -0.5) * std::exp(-y * y / (4.0 * tau));
}

double psi_weight(double r, double a) { return std::pow(r, 1.0 - a) / (1.0 - a); }

double adjusted_value(double N, double r, double a, double C) {
  const double p = C * psi_weight(r, a);
  return std::exp(p) * (N + p);
}

FrequencyEngine::FrequencyEngine(int n, double a, GaussQuadSpec spec)
    : n_(n), a_(a), spec_(spec) {
  if (n != 1 && n != 2) throw std::invalid_argument("FrequencyEngine: n must be 1 or 2");
  if (!(a > -1.0) || !(a < 1.0)) throw std::invalid_argument("FrequencyEngine: a must lie in (-1,1)");
  hermite_ = quad::gauss_hermite(spec.hermite_nodes);
  yrule_ = quad::halfline_gaussian_weight(spec.y_nodes, a);
  trule_ = quad::tanh_sinh01(spec.time_nodes);
}

FrequencyEngine::Slice FrequencyEngine::slice(const Evaluator& U, double t_eval, double tau,
                                              double t_center) const {
  if (!(tau > 0.0)) throw std::domain_error("slice: Gaussian time must be positive");
  const double scale = std::sqrt(4.0 * tau);
  // doubled half-space measure; see header
  const double pref = 2.0 * std::pow(kPi, -0.5 * (n_ + 1)) * std::pow(4.0 * tau, 0.5 * a_);
  const double teff = 2.0 * (t_eval - t_center);
  Slice out;
  const int nh = hermite_.size();
  for (int jy = 0; jy < yrule_.size(); ++jy) {
    const double y = scale * yrule_.x[jy];
    const double wy = yrule_.w[jy];
    double mass = 0.0, dir = 0.0, uzu = 0.0, zz = 0.0;
    for (int i0 = 0; i0 < nh; ++i0) {
      const double w0 = hermite_.w[i0];
      double x[2] = {scale * hermite_.x[i0], 0.0};
      if (n_ == 1) {
        const auto j = U.jet(x, y, t_eval);
        const double zu = x[0] * j.ux[0] + y * j.uy + teff * j.ut;
        mass += w0 * j.u * j.u;
        dir += w0 * (j.ux[0] * j.ux[0] + j.uy * j.uy);
        uzu += w0 * j.u * zu;
        zz += w0 * zu * zu;
      } else {
        for (int i1 = 0; i1 < nh; ++i1) {
          const double w01 = w0 * hermite_.w[i1];
          x[1] = scale * hermite_.x[i1];
          const auto j = U.jet(x, y, t_eval);
          const double zu = x[0] * j.ux[0] + x[1] * j.ux[1] + y * j.uy + teff * j.ut;
          mass += w01 * j.u * j.u;
          dir += w01 * (j.ux[0] * j.ux[0] + j.ux[1] * j.ux[1] + j.uy * j.uy);
          uzu += w01 * j.u * zu;
          zz += w01 * zu * zu;
        }
      }
    }
    out.mass += wy * mass;
    out.dir += wy * dir;
    out.uzu += wy * uzu;
    out.zz += wy * zz;
  }
  out.mass *= pref;
  out.dir *= pref;
  out.uzu *= pref;
  out.zz *= pref;
  return out;
}

double FrequencyEngine::boundary_slice(const BoundaryDensity& f, double t_eval,
                                       double tau) const {
  const double scale = std::sqrt(4.0 * tau);
  const double pref = 2.0 * std::pow(kPi, -0.5 * (n_ + 1)) / scale;
  double acc = 0.0;
  const int nh = hermite_.size();
  for (int i0 = 0; i0 < nh; ++i0) {
    double x[2] = {scale * hermite_.x[i0], 0.0};
    if (n_ == 1) {
      acc += hermite_.w[i0] * f(x, t_eval);
    } else {
      for (int i1 = 0; i1 < nh; ++i1) {
        x[1] = scale * hermite_.x[i1];
        acc += hermite_.w[i0] * hermite_.w[i1] * f(x, t_eval);
      }
    }
  }
  return pref * acc;
}

double FrequencyEngine::height(const Evaluator& U, double t) const {
  if (!(t < 0.0)) throw std::domain_error("height: t must be negative");
  return slice(U, t, -t).mass;
}

double FrequencyEngine::energy_t(const Evaluator& U, const BoundaryDensity* bdry,
                                 double t) const {
  if (!(t < 0.0)) throw std::domain_error("energy_t: t must be negative");
  const double tau = -t;
  double i = tau * slice(U, t, tau).dir;
  if (bdry) i -= tau * boundary_slice(*bdry, t, tau);
  return i;
}

Functionals FrequencyEngine::averaged(const Evaluator& U, const BoundaryDensity* bdry,
                                      double r) const {
  if (!(r > 0.0)) throw std::domain_error("averaged: r must be positive");
  Functionals f;
  double H = 0.0, N1num = 0.0, B = 0.0, uzu_avg = 0.0;
  double cs_zz = 0.0, cs_m = 0.0, cs_uz = 0.0;
  for (int k = 0; k < trule_.size(); ++k) {
    const double w = trule_.x[k];
    const double wt = trule_.w[k];
    const double tau = r * r * w;
    const double t = -tau;
    const Slice s = slice(U, t, tau);
    H += wt * s.mass;
    N1num += wt * tau * s.dir;
    uzu_avg += wt * s.uzu;
    cs_zz += wt * s.zz;
    cs_m += wt * s.mass;
    cs_uz += wt * s.uzu;
    if (bdry) B += wt * tau * boundary_slice(*bdry, t, tau);
  }
  f.H = H;
  f.boundary = B;
  f.I = N1num - B;
  f.I_alt = 0.5 * uzu_avg;
  const double r2 = r * r;
  f.cs_gap = (r2 * cs_zz) * (r2 * cs_m) - (r2 * cs_uz) * (r2 * cs_uz);
  f.cs_scale = (r2 * cs_zz) * (r2 * cs_m);
  if (H > degeneracy_floor) {
    f.N = f.I / H;
    f.N1 = N1num / H;
    f.n_defined = true;
  } else {
    f.N = f.N1 = std::numeric_limits<double>::quiet_NaN();
    f.n_defined = false;
  }
  return f;
}

CenteredTriple FrequencyEngine::centered(const Evaluator& U0, double t0, double r) const {
  if (!(t0 < 0.0)) throw std::domain_error("centered: t0 must be negative");
  const double guard = std::min((-t0 + 1.0) / 2.0, -2.0 * t0);
  if (!(-t0 + r * r < guard))
    throw std::domain_error("centered: r out of the admissible range for this t0");
  const double tau = r * r;
  const Slice s = slice(U0, t0 - tau, tau, t0);
  CenteredTriple out;
  out.h = s.mass;
  out.i = tau * s.dir;
  if (s.mass > degeneracy_floor) {
    out.n = out.i / out.h;
    out.n_defined = true;
  } else {
    out.n = std::numeric_limits<double>::quiet_NaN();
    out.n_defined = false;
  }
  return out;
}

FirstVariation FrequencyEngine::first_variation_check(const Evaluator& U,
                                                      const BoundaryDensity* bdry, double r,
                                                      double dr) const {
  FirstVariation fv;
  const Functionals f0 = averaged(U, bdry, r);
  const double formula = (4.0 / r) * f0.I + (a_ / r) * f0.H;
  for (int k = 0; k < 3; ++k) {
    const double d = dr / std::pow(2.0, k);
    const double hp = averaged(U, bdry, r + d).H;
    const double hm = averaged(U, bdry, r - d).H;
    fv.dr.push_back(d);
    fv.residual.push_back(std::abs((hp - hm) / (2.0 * d) - formula));
  }
  // least-squares slope of log residual vs log dr
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t k = 0; k < fv.dr.size(); ++k) {
    if (fv.residual[k] <= 0.0) continue;
    const double lx = std::log(fv.dr[k]), ly = std::log(fv.residual[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  fv.order = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  return fv;
}

FrequencyCurve FrequencyEngine::adjusted_frequency_curve(const Evaluator& U,
                                                         const BoundaryDensity* bdry,
                                                         const std::vector<double>& rs,
                                                         double C, bool with_fd) const {
  if (rs.empty()) throw std::invalid_argument("adjusted_frequency_curve: empty r list");
  for (size_t k = 1; k < rs.size(); ++k)
    if (!(rs[k] > rs[k - 1]))
      throw std::invalid_argument("adjusted_frequency_curve: r list must increase");
  if (!(C >= 0.0)) throw std::invalid_argument("adjusted_frequency_curve: C must be >= 0");
  FrequencyCurve curve;
  curve.C = C;
  for (double r : rs) {
    const Functionals f = averaged(U, bdry, r);
    curve.r.push_back(r);
    curve.H.push_back(f.H);
    curve.I.push_back(f.I);
    curve.N.push_back(f.N);
    curve.N1.push_back(f.N1);
    curve.psi.push_back(psi_weight(r, a_));
    curve.flag.push_back(f.n_defined ? "ok" : "H-degenerate");
    curve.adjusted.push_back(f.n_defined ? adjusted_value(f.N, r, a_, C)
                                         : std::numeric_limits<double>::quiet_NaN());
    if (with_fd) {
      const double d = 0.02 * r;
      const double hp = averaged(U, bdry, r + d).H;
      const double hm = averaged(U, bdry, r - d).H;
      curve.dH_fd.push_back((hp - hm) / (2.0 * d));
      curve.dH_formula.push_back((4.0 / r) * f.I + (a_ / r) * f.H);
    } else {
      curve.dH_fd.push_back(std::numeric_limits<double>::quiet_NaN());
      curve.dH_formula.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    if (!f.n_defined) break;  // curve truncated, flagged above
  }
  curve.min_increment = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < curve.adjusted.size(); ++k)
    curve.min_increment = std::min(curve.min_increment, curve.adjusted[k] - curve.adjusted[k - 1]);
  curve.monotone = curve.adjusted.size() >= 2 && curve.min_increment >= -1e-8;
  return curve;
}

double FrequencyEngine::calibrate_C(const std::vector<double>& rs,
                                    const std::vector<double>& Ns, double resolution,
                                    double slack) const {
  if (rs.size() != Ns.size() || rs.size() < 2)
    throw std::invalid_argument("calibrate_C: need matching r/N samples");
  const auto monotone = [&](double C) {
    double prev = adjusted_value(Ns[0], rs[0], a_, C);
    for (size_t k = 1; k < rs.size(); ++k) {
      const double cur = adjusted_value(Ns[k], rs[k], a_, C);
      if (cur - prev < -slack) return false;
      prev = cur;
    }
    return true;
  };
  if (monotone(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!monotone(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("calibrate_C: no monotonizing constant below 1e6");
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (monotone(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace fhlab::frequency
