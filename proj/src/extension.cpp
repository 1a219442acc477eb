#include "fhlab/extension.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fhlab/specfun.hpp"

namespace fhlab::extension {

namespace {
constexpr double kPi = std::numbers::pi;

// least squares fit of complex data against real basis columns; returns the
// coefficient vector (normal equations, columns scaled to unit max)
std::vector<cplx> ls_fit(const std::vector<std::vector<double>>& cols,
                         const std::vector<cplx>& rhs) {
  const int m = static_cast<int>(rhs.size());
  const int k = static_cast<int>(cols.size());
  std::vector<double> scale(k, 1.0);
  std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
  std::vector<cplx> b(k, 0.0);
  std::vector<std::vector<double>> cs = cols;
  for (int j = 0; j < k; ++j) {
    double mx = 0.0;
    for (int i = 0; i < m; ++i) mx = std::max(mx, std::abs(cs[j][i]));
    scale[j] = mx > 0 ? mx : 1.0;
    for (int i = 0; i < m; ++i) cs[j][i] /= scale[j];
  }
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q)
      for (int i = 0; i < m; ++i) a[p][q] += cs[p][i] * cs[q][i];
    for (int i = 0; i < m; ++i) b[p] += cs[p][i] * rhs[i];
  }
  // gaussian elimination with partial pivoting
  for (int p = 0; p < k; ++p) {
    int piv = p;
    for (int q = p + 1; q < k; ++q)
      if (std::abs(a[q][p]) > std::abs(a[piv][p])) piv = q;
    std::swap(a[p], a[piv]);
    std::swap(b[p], b[piv]);
    for (int q = p + 1; q < k; ++q) {
      const double f = a[q][p] / a[p][p];
      for (int c = p; c < k; ++c) a[q][c] -= f * a[p][c];
      b[q] -= f * b[p];
    }
  }
  std::vector<cplx> sol(k);
  for (int p = k - 1; p >= 0; --p) {
    cplx acc = b[p];
    for (int c = p + 1; c < k; ++c) acc -= a[p][c] * sol[c];
    sol[p] = acc / a[p][p];
  }
  for (int j = 0; j < k; ++j) sol[j] /= scale[j];
  return sol;
}

}  // namespace

YGrid YGrid::geometric(int m, double y0, double ymax) {
  if (m < 8) throw std::invalid_argument("YGrid: need at least 8 nodes");
  YGrid g;
  g.nodes.resize(m);
  const double ratio = std::pow(ymax / y0, 1.0 / (m - 1));
  for (int i = 0; i < m; ++i) g.nodes[i] = y0 * std::pow(ratio, i);
  g.nodes.back() = ymax;
  g.validate();
  return g;
}

void YGrid::validate() const {
  if (nodes.size() < 8) throw std::invalid_argument("YGrid: too few nodes");
  if (!(nodes.front() <= 1e-3)) throw std::invalid_argument("YGrid: first node must be <= 1e-3");
  if (!(nodes.back() >= 8.0)) throw std::invalid_argument("YGrid: last node must be >= 8");
  for (size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("YGrid: nodes must increase");
  if (!(nodes.front() > 0.0)) throw std::invalid_argument("YGrid: nodes must be positive");
}

ExtensionField::ExtensionField(const SpaceTimeField& u, FracConfig cfg, YGrid ygrid)
    : grid_(u.grid()), cfg_(cfg), ygrid_(std::move(ygrid)) {
  cfg_.validate();
  ygrid_.validate();
  modes_ = fields::sparse_modes(u);
  mode_L_.resize(modes_.size());
  for (size_t m = 0; m < modes_.size(); ++m)
    mode_L_[m] = specfun::principal_L_from_symbol(modes_[m].symbol_lambda());
}

ExtensionField extend(const SpaceTimeField& u, const FracConfig& cfg, const YGrid& ygrid) {
  return ExtensionField(u, cfg, ygrid);
}

cplx ExtensionField::mode_profile(int mode, double y) const {
  const cplx L = mode_L_[mode];
  if (L == cplx(0.0)) return 1.0;
  const double s = cfg_.s;
  try {
    return specfun::phi(s, L * y) / specfun::phi(s, cplx(0.0));
  } catch (const std::domain_error& e) {
    throw std::domain_error("extend: mode " + std::to_string(mode) + ": " + e.what());
  }
}

cplx ExtensionField::mode_profile_dy(int mode, double y) const {
  const cplx L = mode_L_[mode];
  if (L == cplx(0.0)) return 0.0;
  const double s = cfg_.s;
  try {
    return L * specfun::phi_prime(s, L * y) / specfun::phi(s, cplx(0.0));
  } catch (const std::domain_error& e) {
    throw std::domain_error("extend: mode " + std::to_string(mode) + ": " + e.what());
  }
}

namespace {
// single-y profile cache; frequency quadratures sweep many x at fixed y
struct ProfileCache {
  const void* owner = nullptr;
  double y = -1.0;
  std::vector<cplx> rho, drho;
};
thread_local ProfileCache tl_cache;
}  // namespace

Jet ExtensionField::jet(const double* x, double y, double t) const {
  ProfileCache& pc = tl_cache;
  const size_t nm = modes_.size();
  if (pc.owner != this || pc.y != y) {
    pc.owner = this;
    pc.y = y;
    pc.rho.resize(nm);
    pc.drho.resize(nm);
    for (size_t m = 0; m < nm; ++m) {
      pc.rho[m] = mode_profile(static_cast<int>(m), y);
      pc.drho[m] = mode_profile_dy(static_cast<int>(m), y);
    }
  }
  cplx u = 0.0, ux0 = 0.0, ux1 = 0.0, uy = 0.0, ut = 0.0;
  for (size_t m = 0; m < nm; ++m) {
    const auto& mc = modes_[m];
    double ph = mc.sigma * t + mc.xi[0] * x[0];
    if (grid_.dim == 2) ph += mc.xi[1] * x[1];
    const cplx wave = mc.coeff * std::exp(cplx(0.0, 2.0 * kPi * ph));
    const cplx base = wave * pc.rho[m];
    u += base;
    ux0 += base * cplx(0.0, 2.0 * kPi * mc.xi[0]);
    if (grid_.dim == 2) ux1 += base * cplx(0.0, 2.0 * kPi * mc.xi[1]);
    ut += base * cplx(0.0, 2.0 * kPi * mc.sigma);
    uy += wave * pc.drho[m];
  }
  Jet j;
  j.u = u.real();
  j.ux = {ux0.real(), ux1.real()};
  j.uy = uy.real();
  j.ut = ut.real();
  return j;
}

cplx ExtensionField::value_c(const double* x, double y, double t) const {
  cplx u = 0.0;
  for (size_t m = 0; m < modes_.size(); ++m) {
    const auto& mc = modes_[m];
    double ph = mc.sigma * t + mc.xi[0] * x[0];
    if (grid_.dim == 2) ph += mc.xi[1] * x[1];
    u += mc.coeff * std::exp(cplx(0.0, 2.0 * kPi * ph)) * mode_profile(static_cast<int>(m), y);
  }
  return u;
}

const std::vector<double>& ExtensionField::samples() const {
  if (!cache_.empty()) return cache_;
  const auto& g = grid_;
  const int my = static_cast<int>(ygrid_.nodes.size());
  cache_.resize(static_cast<size_t>(g.nspace()) * my * g.nt);
  size_t idx = 0;
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jy = 0; jy < my; ++jy)
        for (int jt = 0; jt < g.nt; ++jt) {
          const double x[2] = {g.x_of(0, j0), g.dim == 2 ? g.x_of(1, j1) : 0.0};
          cache_[idx++] = value_c(x, ygrid_.nodes[jy], g.t_of(jt)).real();
        }
  return cache_;
}

NeumannTrace neumann_trace(const ExtensionField& ext) {
  const auto& g = ext.grid();
  const double s = ext.cfg().s;
  const double a = ext.cfg().a();
  const double cs = ext.cfg().c_s();
  const auto& modes = ext.modes();

  // route (i): closed-form limit of y^a d/dy of the profile at 0+,
  //   -L^2s * Phi_{1-s}(0) / Phi_s(0)
  const double ratio0 = (specfun::phi(1.0 - s, cplx(0.0)) / specfun::phi(s, cplx(0.0))).real();
  std::vector<cplx> spectral(modes.size());
  for (size_t m = 0; m < modes.size(); ++m) {
    const cplx l2s = std::pow(modes[m].symbol_lambda(), s);
    spectral[m] = -modes[m].coeff * l2s * ratio0;  // lim y^a dU^/dy per mode
  }

  // route (ii): evaluate y^a dU^/dy on the six smallest nodes and remove
  // the known boundary powers {y^(2-2s), y^2, y^(4-2s)} by least squares
  const int kfit = 6;
  std::vector<double> ys(ext.ygrid().nodes.begin(), ext.ygrid().nodes.begin() + kfit);
  std::vector<std::vector<double>> cols(4, std::vector<double>(kfit));
  for (int i = 0; i < kfit; ++i) {
    cols[0][i] = 1.0;
    cols[1][i] = std::pow(ys[i], 2.0 - 2.0 * s);
    cols[2][i] = ys[i] * ys[i];
    cols[3][i] = std::pow(ys[i], 4.0 - 2.0 * s);
  }
  std::vector<cplx> grid_limit(modes.size());
  double num = 0.0, den = 0.0;
  for (size_t m = 0; m < modes.size(); ++m) {
    std::vector<cplx> flux(kfit);
    for (int i = 0; i < kfit; ++i)
      flux[i] = std::pow(ys[i], a) * modes[m].coeff * ext.mode_profile_dy(static_cast<int>(m), ys[i]);
    const auto fit = ls_fit(cols, flux);
    grid_limit[m] = fit[0];
    // divergence diagnostic: the model must actually explain the samples
    double resid = 0.0, scale = std::abs(fit[0]);
    for (int i = 0; i < kfit; ++i) {
      cplx model = fit[0] + fit[1] * cols[1][i] + fit[2] * cols[2][i] + fit[3] * cols[3][i];
      resid = std::max(resid, std::abs(model - flux[i]));
      scale = std::max(scale, std::abs(flux[i]));
    }
    if (modes[m].symbol_lambda() != cplx(0.0) && scale > 0.0 && resid > 1e-3 * scale)
      throw std::runtime_error("neumann_trace: y->0 extrapolation did not settle for mode " +
                               std::to_string(m));
    num += std::norm(grid_limit[m] - spectral[m]);
    den += std::norm(spectral[m]);
  }

  // assemble the H^s u field from the spectral route
  std::vector<cplx> sp(g.total(), cplx(0.0));
  for (size_t m = 0; m < modes.size(); ++m) {
    // map the mode frequencies back to FFT bins
    const auto& mc = modes[m];
    const int k0 = static_cast<int>(std::lround(mc.xi[0] * g.lx[0]));
    const int k1 = g.dim == 2 ? static_cast<int>(std::lround(mc.xi[1] * g.lx[1])) : 0;
    const int kt = static_cast<int>(std::lround(mc.sigma * g.tspan));
    const int j0 = (k0 % g.nx[0] + g.nx[0]) % g.nx[0];
    const int j1 = (k1 % g.nx[1] + g.nx[1]) % g.nx[1];
    const int jt = (kt % g.nt + g.nt) % g.nt;
    sp[g.index(j0, j1, jt)] = -spectral[m] / cs * static_cast<double>(g.total());
  }
  NeumannTrace out{SpaceTimeField::from_spectrum(g, std::move(sp)),
                   den > 0.0 ? std::sqrt(num / den) : 0.0};
  return out;
}

double pde_residual(const Evaluator& U, double a, const Box& box, double h) {
  if (!(box.y[0] - h > 0.0))
    throw std::invalid_argument("pde_residual: box must stay inside y > 0 at stencil width h");
  for (int k = 0; k < 4; ++k)
    if (box.samples[k] < 1) throw std::invalid_argument("pde_residual: empty sample box");
  const int n = U.dim();
  double worst = 0.0;
  const auto lin = [](double lo, double hi, int m, int i) {
    return m == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (m - 1.0);
  };
  for (int i0 = 0; i0 < box.samples[0]; ++i0)
    for (int i1 = 0; i1 < (n == 2 ? box.samples[1] : 1); ++i1)
      for (int iy = 0; iy < box.samples[2]; ++iy)
        for (int it = 0; it < box.samples[3]; ++it) {
          double x[2] = {lin(box.x0[0], box.x0[1], box.samples[0], i0),
                         n == 2 ? lin(box.x1[0], box.x1[1], box.samples[1], i1) : 0.0};
          const double y = lin(box.y[0], box.y[1], box.samples[2], iy);
          const double t = lin(box.t[0], box.t[1], box.samples[3], it);
          const double ya = std::pow(y, a);
          const double c = U.value(x, y, t);
          // y^a U_t
          const double ut = (U.value(x, y, t + h) - U.value(x, y, t - h)) / (2.0 * h);
          // sum_x (U(x+h) - 2U + U(x-h))/h^2
          double lap = 0.0;
          for (int ax = 0; ax < n; ++ax) {
            const double keep = x[ax];
            x[ax] = keep + h;
            const double up = U.value(x, y, t);
            x[ax] = keep - h;
            const double dn = U.value(x, y, t);
            x[ax] = keep;
            lap += (up - 2.0 * c + dn) / (h * h);
          }
          // (y^a U_y)_y with half-node weights
          const double wp = std::pow(y + 0.5 * h, a);
          const double wm = std::pow(y - 0.5 * h, a);
          const double div_y = (wp * (U.value(x, y + h, t) - c) - wm * (c - U.value(x, y - h, t))) / (h * h);
          const double res = ya * ut - (ya * lap + div_y);
          worst = std::max(worst, std::abs(res));
        }
  return worst;
}

ResidualOrder pde_residual_order(const Evaluator& U, double a, const Box& box, double h,
                                 double exact_floor) {
  ResidualOrder r{};
  r.res_h = pde_residual(U, a, box, h);
  r.res_h2 = pde_residual(U, a, box, h / 2.0);
  r.exact = r.res_h < exact_floor && r.res_h2 < exact_floor;
  r.order = r.exact ? std::numeric_limits<double>::quiet_NaN()
                    : std::log2(r.res_h / r.res_h2);
  return r;
}

void write_snapshot(const std::string& path, const ExtensionField& ext) {
  const auto& vals = ext.samples();
  std::vector<cplx> data(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) data[i] = vals[i];
  fields::write_fhfl_raw(path, ext.grid(), ext.ygrid().nodes, data);
}

Snapshot read_snapshot(const std::string& path) {
  Snapshot s;
  std::vector<cplx> data;
  fields::read_fhfl_raw(path, s.grid, s.yaxis, data);
  if (s.yaxis.empty()) throw std::runtime_error("read_snapshot: file has no y axis");
  s.values.resize(data.size());
  for (size_t i = 0; i < data.size(); ++i) s.values[i] = data[i].real();
  return s;
}

double poisson_check(const SpaceTimeField& u, const FracConfig& cfg,
                     const std::vector<Probe>& probes) {
  cfg.validate();
  const double s = cfg.s;
  const auto modes = fields::sparse_modes(u);
  const ExtensionField ext(u, cfg, YGrid::geometric());
  const double gs = specfun::gamma_pos(s);

  // per-mode tau-integral on the half-angle-rotated contour; plain
  // exponential substitution, trapezoid with its own node budget
  const auto tau_integral = [&](cplx lambda, double y) -> cplx {
    const double b = y * y / 4.0;
    if (lambda == cplx(0.0)) return specfun::gamma_pos(s) * std::pow(b, -s);
    const double psi = -std::arg(lambda) / 2.0;
    const cplx eipsi = std::exp(cplx(0.0, psi));
    const cplx beta = b * std::conj(eipsi);   // coefficient of 1/rho
    const cplx gam = lambda * eipsi;          // coefficient of rho
    const double pb = beta.real(), pg = gam.real();
    const double nu = -s;
    const auto lmag = [&](double v) { return nu * v - pb * std::exp(-v) - pg * std::exp(v); };
    const double ev_peak = (nu + std::sqrt(nu * nu + 4.0 * pb * pg)) / (2.0 * pg);
    const double v_peak = std::log(ev_peak);
    const double target = lmag(v_peak) - 42.0;
    const auto expand = [&](double dir) {
      double step = 0.5;
      while (lmag(v_peak + dir * step) > target) step *= 2.0;
      double lo = 0.5 * step, hi = step;
      for (int it = 0; it < 36; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lmag(v_peak + dir * mid) > target ? lo : hi) = mid;
      }
      return v_peak + dir * hi;
    };
    const double vlo = expand(-1.0), vhi = expand(+1.0);
    const int nn = 280;
    const double hh = (vhi - vlo) / (nn - 1);
    cplx acc = 0.0;
    for (int i = 0; i < nn; ++i) {
      const double v = vlo + i * hh;
      const double rho = std::exp(v);
      cplx val = std::exp(cplx(nu * v, 0.0) - beta / rho - gam * rho);
      acc += (i == 0 || i == nn - 1) ? 0.5 * val : val;
    }
    return std::exp(cplx(0.0, nu * psi)) * acc * hh;
  };

  double worst = 0.0;
  for (const auto& p : probes) {
    if (!(p.y > 0.0)) throw std::invalid_argument("poisson_check: probe needs y > 0");
    cplx via_poisson = 0.0;
    for (const auto& mc : modes) {
      double ph = mc.sigma * p.t + mc.xi[0] * p.x[0];
      if (u.grid().dim == 2) ph += mc.xi[1] * p.x[1];
      via_poisson += mc.coeff * std::exp(cplx(0.0, 2.0 * kPi * ph)) *
                     tau_integral(mc.symbol_lambda(), p.y);
    }
    via_poisson *= std::pow(p.y, 2.0 * s) / (std::pow(4.0, s) * gs);
    const cplx via_profile = ext.value_c(p.x.data(), p.y, p.t);
    const double scale = std::max({std::abs(via_profile), std::abs(via_poisson), 1e-300});
    worst = std::max(worst, std::abs(via_poisson - via_profile) / scale);
  }
  return worst;
}

}  // namespace fhlab::extension
