#include "fhlab/fields.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace fhlab::fields {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// In-place radix-2 Cooley-Tukey on a strided view; sign = -1 forward.
void fft_strided(cplx* data, int n, int stride, int sign) {
  // bit reversal
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i * stride], data[j * stride]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / len;
    const cplx wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cplx w(1.0);
      for (int k = 0; k < len / 2; ++k) {
        cplx& a = data[(i + k) * stride];
        cplx& b = data[(i + k + len / 2) * stride];
        const cplx t = b * w;
        b = a - t;
        a += t;
        w *= wl;
      }
    }
  }
}

void fft_all_axes(const SpaceTimeGrid& g, std::vector<cplx>& v, int sign) {
  // time axis: contiguous runs of length nt
  const int ns = g.nspace();
  for (int s = 0; s < ns; ++s) fft_strided(v.data() + s * g.nt, g.nt, 1, sign);
  // first space axis: stride nx1*nt
  const int stride0 = g.nx[1] * g.nt;
  for (int r = 0; r < g.nx[1] * g.nt; ++r) fft_strided(v.data() + r, g.nx[0], stride0, sign);
  if (g.dim == 2) {
    for (int j0 = 0; j0 < g.nx[0]; ++j0)
      for (int jt = 0; jt < g.nt; ++jt)
        fft_strided(v.data() + j0 * g.nx[1] * g.nt + jt, g.nx[1], g.nt, sign);
  }
}

}  // namespace

void SpaceTimeGrid::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (!is_pow2(nx[0]) || nx[0] < 8) throw std::invalid_argument("grid: nx must be a power of two >= 8");
  if (dim == 2 && (!is_pow2(nx[1]) || nx[1] < 8))
    throw std::invalid_argument("grid: nx (axis 1) must be a power of two >= 8");
  if (dim == 1 && nx[1] != 1) throw std::invalid_argument("grid: nx[1] must be 1 when dim == 1");
  if (!is_pow2(nt) || nt < 8) throw std::invalid_argument("grid: nt must be a power of two >= 8");
  if (!(lx[0] > 0.0) || (dim == 2 && !(lx[1] > 0.0)) || !(tspan > 0.0))
    throw std::invalid_argument("grid: lengths must be positive");
}

std::vector<cplx> dft_forward(const SpaceTimeGrid& g, const std::vector<cplx>& samples) {
  if (static_cast<int>(samples.size()) != g.total())
    throw std::invalid_argument("dft_forward: sample count does not match grid");
  std::vector<cplx> v = samples;
  fft_all_axes(g, v, -1);
  return v;
}

std::vector<cplx> dft_inverse(const SpaceTimeGrid& g, const std::vector<cplx>& spectrum) {
  if (static_cast<int>(spectrum.size()) != g.total())
    throw std::invalid_argument("dft_inverse: spectrum size does not match grid");
  std::vector<cplx> v = spectrum;
  fft_all_axes(g, v, +1);
  const double scale = 1.0 / g.total();
  for (auto& c : v) c *= scale;
  return v;
}

SpaceTimeField SpaceTimeField::from_samples(const SpaceTimeGrid& g, std::vector<cplx> samples) {
  g.validate();
  SpaceTimeField f;
  f.grid_ = g;
  f.spectrum_ = dft_forward(g, samples);
  f.samples_ = std::move(samples);
  return f;
}

SpaceTimeField SpaceTimeField::from_spectrum(const SpaceTimeGrid& g, std::vector<cplx> spectrum) {
  g.validate();
  SpaceTimeField f;
  f.grid_ = g;
  f.samples_ = dft_inverse(g, spectrum);
  f.spectrum_ = std::move(spectrum);
  return f;
}

SpaceTimeField SpaceTimeField::zero(const SpaceTimeGrid& g) {
  g.validate();
  SpaceTimeField f;
  f.grid_ = g;
  f.samples_.assign(g.total(), cplx(0.0));
  f.spectrum_.assign(g.total(), cplx(0.0));
  return f;
}

double SpaceTimeField::l2_norm() const {
  double acc = 0.0, comp = 0.0;
  for (const auto& c : samples_) {
    const double v = std::norm(c) - comp;
    const double t = acc + v;
    comp = (t - acc) - v;
    acc = t;
  }
  double meas = grid_.dt();
  for (int a = 0; a < grid_.dim; ++a) meas *= grid_.dx(a);
  return std::sqrt(acc * meas);
}

double SpaceTimeField::linf_norm() const {
  double m = 0.0;
  for (const auto& c : samples_) m = std::max(m, std::abs(c));
  return m;
}

double SpaceTimeField::spectral_energy() const {
  double acc = 0.0, comp = 0.0;
  for (const auto& c : spectrum_) {
    const double v = std::norm(c) - comp;
    const double t = acc + v;
    comp = (t - acc) - v;
    acc = t;
  }
  double meas = grid_.dt();
  for (int a = 0; a < grid_.dim; ++a) meas *= grid_.dx(a);
  return acc * meas / grid_.total();
}

SpaceTimeField time_shift(const SpaceTimeField& u, double h) {
  const auto& g = u.grid();
  std::vector<cplx> sp = u.spectrum();
  for (int s = 0; s < g.nspace(); ++s)
    for (int jt = 0; jt < g.nt; ++jt) {
      const double sigma = g.sigma_of(jt);
      sp[s * g.nt + jt] *= std::exp(cplx(0.0, 2.0 * kPi * sigma * h));
    }
  return SpaceTimeField::from_spectrum(g, std::move(sp));
}

SpaceTimeField heat_semigroup(const SpaceTimeField& u, double tau) {
  if (!(tau >= 0.0)) throw std::domain_error("heat_semigroup: tau must be >= 0");
  const auto& g = u.grid();
  std::vector<cplx> sp = u.spectrum();
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1) {
      double xi2 = 0.0;
      const double xi0 = g.xi_of(0, j0);
      xi2 += xi0 * xi0;
      if (g.dim == 2) {
        const double xi1 = g.xi_of(1, j1);
        xi2 += xi1 * xi1;
      }
      for (int jt = 0; jt < g.nt; ++jt) {
        const cplx lam(4.0 * kPi * kPi * xi2, 2.0 * kPi * g.sigma_of(jt));
        sp[g.index(j0, j1, jt)] *= std::exp(-tau * lam);
      }
    }
  return SpaceTimeField::from_spectrum(g, std::move(sp));
}

double band_occupancy(const SpaceTimeField& u, double rel_tol) {
  const auto& g = u.grid();
  double mx = 0.0;
  for (const auto& c : u.spectrum()) mx = std::max(mx, std::abs(c));
  const double thr = mx * rel_tol;
  double occ = 0.0;
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt) {
        if (std::abs(u.spectrum()[g.index(j0, j1, jt)]) <= thr) continue;
        double f = std::abs(SpaceTimeGrid::signed_index(j0, g.nx[0])) / (g.nx[0] / 2.0);
        if (g.dim == 2)
          f = std::max(f, std::abs(SpaceTimeGrid::signed_index(j1, g.nx[1])) / (g.nx[1] / 2.0));
        f = std::max(f, std::abs(SpaceTimeGrid::signed_index(jt, g.nt)) / (g.nt / 2.0));
        occ = std::max(occ, f);
      }
  return occ;
}

cplx ModeCoeff::symbol_lambda() const {
  const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
  return cplx(4.0 * kPi * kPi * xi2, 2.0 * kPi * sigma);
}

std::vector<ModeCoeff> sparse_modes(const SpaceTimeField& u, double rel_tol) {
  const auto& g = u.grid();
  double mx = 0.0;
  for (const auto& c : u.spectrum()) mx = std::max(mx, std::abs(c));
  const double thr = mx * rel_tol;
  std::vector<ModeCoeff> out;
  const double scale = 1.0 / g.total();
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt) {
        const cplx c = u.spectrum()[g.index(j0, j1, jt)];
        if (std::abs(c) <= thr) continue;
        ModeCoeff m;
        m.xi[0] = g.xi_of(0, j0);
        if (g.dim == 2) m.xi[1] = g.xi_of(1, j1);
        m.sigma = g.sigma_of(jt);
        m.coeff = c * scale;
        out.push_back(m);
      }
  return out;
}

cplx evaluate_modes(const std::vector<ModeCoeff>& modes, const double* x, int dim, double t) {
  cplx acc = 0.0;
  for (const auto& m : modes) {
    double ph = m.sigma * t;
    for (int a = 0; a < dim; ++a) ph += m.xi[a] * x[a];
    acc += m.coeff * std::exp(cplx(0.0, 2.0 * kPi * ph));
  }
  return acc;
}

namespace {
constexpr char kMagic[4] = {'F', 'H', 'F', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

void write_fhfl_raw(const std::string& path, const SpaceTimeGrid& g,
                    const std::vector<double>& yaxis, const std::vector<cplx>& data) {
  const size_t want = static_cast<size_t>(g.nspace()) * std::max<size_t>(1, yaxis.size()) * g.nt;
  if (data.size() != want)
    throw std::invalid_argument("write_fhfl_raw: sample count does not match grid and y axis");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_fhfl: cannot open " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(g.dim));
  put(os, static_cast<std::uint32_t>(g.nx[0]));
  put(os, static_cast<std::uint32_t>(g.nx[1]));
  put(os, g.lx[0]);
  put(os, g.lx[1]);
  put(os, static_cast<std::uint32_t>(g.nt));
  put(os, g.tspan);
  put(os, static_cast<std::uint32_t>(yaxis.size()));
  for (double y : yaxis) put(os, y);
  for (const auto& c : data) {
    put(os, c.real());
    put(os, c.imag());
  }
}

void read_fhfl_raw(const std::string& path, SpaceTimeGrid& g, std::vector<double>& yaxis,
                   std::vector<cplx>& data) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_fhfl: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("read_fhfl: bad magic");
  std::uint32_t version;
  get(is, version);
  if (version != kVersion) throw std::runtime_error("read_fhfl: unsupported version");
  std::uint32_t dim, n0, n1, nt, ny;
  get(is, dim);
  get(is, n0);
  get(is, n1);
  get(is, g.lx[0]);
  get(is, g.lx[1]);
  get(is, nt);
  get(is, g.tspan);
  g.dim = dim;
  g.nx = {static_cast<int>(n0), static_cast<int>(n1)};
  g.nt = nt;
  get(is, ny);
  yaxis.resize(ny);
  for (auto& y : yaxis) get(is, y);
  data.resize(static_cast<size_t>(g.nspace()) * std::max<std::uint32_t>(1, ny) * g.nt);
  for (auto& c : data) {
    double re, im;
    get(is, re);
    get(is, im);
    c = {re, im};
  }
  if (!is) throw std::runtime_error("read_fhfl: truncated file");
}

void write_fhfl(const std::string& path, const SpaceTimeField& u) {
  write_fhfl_raw(path, u.grid(), {}, u.samples());
}

SpaceTimeField read_fhfl(const std::string& path) {
  SpaceTimeGrid g;
  std::vector<double> yaxis;
  std::vector<cplx> data;
  read_fhfl_raw(path, g, yaxis, data);
  if (!yaxis.empty())
    throw std::runtime_error("read_fhfl: file carries a y axis; it is an extension snapshot");
  return SpaceTimeField::from_samples(g, std::move(data));
}

void write_csv(const std::string& path, const SpaceTimeField& u) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  const auto& g = u.grid();
  os << "x0,x1,t,re,im\n";
  char buf[160];
  for (int j0 = 0; j0 < g.nx[0]; ++j0)
    for (int j1 = 0; j1 < g.nx[1]; ++j1)
      for (int jt = 0; jt < g.nt; ++jt) {
        const cplx c = u.samples()[g.index(j0, j1, jt)];
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e\n",
                      g.x_of(0, j0), g.dim == 2 ? g.x_of(1, j1) : 0.0, g.t_of(jt),
                      c.real(), c.imag());
        os << buf;
      }
}

}  // namespace fhlab::fields
