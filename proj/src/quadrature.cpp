#include "fhlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fhlab::quad {

namespace {

constexpr double kPi = std::numbers::pi;

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix (diag d, offdiag e), weights are mu0 * (first eigenvector
// component)^2. Implicit-shift QL with eigenvector first components only.
void golub_welsch(std::vector<double>& d, std::vector<double>& e, double mu0,
                  Rule1D& out) {
  const int n = static_cast<int>(d.size());
  std::vector<double> z(n, 0.0);
  z[0] = 1.0;
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("golub_welsch: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  // sort by node
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (d[idx[j]] < d[idx[i]]) std::swap(idx[i], idx[j]);
  out.x.resize(n);
  out.w.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] = d[idx[i]];
    out.w[i] = mu0 * z[idx[i]] * z[idx[i]];
  }
}

}  // namespace

Rule1D gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
  std::vector<double> d(n, 0.0), e(n - 1);
  for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(k / 2.0);
  Rule1D r;
  golub_welsch(d, e, std::sqrt(kPi), r);
  return r;
}

Rule1D gauss_jacobi01(int n, double beta) {
  if (n < 1 || beta <= -1.0) throw std::invalid_argument("gauss_jacobi01: bad args");
  // weight (1+x)^beta on (-1,1), alpha = 0; then map x -> (1+x)/2
  const double al = 0.0, be = beta;
  std::vector<double> d(n), e(n - 1);
  const double ab = al + be;
  d[0] = (be - al) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double k2 = 2.0 * k + ab;
    d[k] = (be * be - al * al) / (k2 * (k2 + 2.0));
    const double num = 4.0 * k * (k + al) * (k + be) * (k + ab);
    const double den = (k2 - 1.0) * k2 * k2 * (k2 + 1.0);
    e[k - 1] = std::sqrt(num / den);
  }
  // mu0 = int_{-1}^1 (1+x)^beta dx = 2^(beta+1)/(beta+1)
  const double mu0 = std::pow(2.0, beta + 1.0) / (beta + 1.0);
  Rule1D r;
  golub_welsch(d, e, mu0, r);
  // map to (0,1): t = (1+x)/2, dt = dx/2, t^beta = ((1+x)/2)^beta
  const double scale = std::pow(2.0, -beta - 1.0);
  for (int i = 0; i < r.size(); ++i) {
    r.x[i] = 0.5 * (1.0 + r.x[i]);
    r.w[i] *= scale;
  }
  return r;
}

Rule1D gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n >= 1 required");
  std::vector<double> d(n), e(n - 1);
  for (int k = 0; k < n; ++k) d[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) e[k - 1] = static_cast<double>(k);
  Rule1D r;
  golub_welsch(d, e, 1.0, r);
  return r;
}

Rule1D halfline_gaussian_weight(int n, double a) {
  if (n < 8 || a <= -1.0) throw std::invalid_argument("halfline_gaussian_weight: bad args");
  // y = exp(u - exp(-u)) maps R onto (0,inf); with weight y^a e^{-y^2} the
  // trapezoidal sum decays double-exponentially at both ends for any
  // integrand with an integrable power at 0.
  const double u_lo = -6.5, u_hi = 2.2;
  const double h = (u_hi - u_lo) / (n - 1);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = u_lo + i * h;
    const double eu = std::exp(-u);
    const double y = std::exp(u - eu);
    const double dy = y * (1.0 + eu);
    double w = h * dy * std::exp(a * (u - eu) - y * y);
    if (i == 0 || i == n - 1) w *= 0.5;
    r.x[i] = y;
    r.w[i] = w;
  }
  return r;
}

Rule1D tanh_sinh01(int n) {
  if (n < 8) throw std::invalid_argument("tanh_sinh01: n >= 8 required");
  const double u_max = 3.2;
  const double h = 2.0 * u_max / (n - 1);
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = -u_max + i * h;
    const double t = kPi * std::sinh(u);
    // logistic form keeps the endpoint nodes strictly inside (0,1)
    const double x = 1.0 / (1.0 + std::exp(-t));
    const double xm = 1.0 / (1.0 + std::exp(t));  // 1 - x without cancellation
    double w = h * kPi * std::cosh(u) * x * xm;
    if (i == 0 || i == n - 1) w *= 0.5;
    r.x[i] = x;
    r.w[i] = w;
  }
  return r;
}

}  // namespace fhlab::quad
