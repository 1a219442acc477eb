#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

// Discrete space-time function spaces: a periodic grid in x (1 or 2 axes)
// tensored with a uniform time window covering t in [-T, 0).
//
// Transform convention: forward \hat u(k) = sum_j u_j e^{-2 pi i <k,j>/N}
// with no prefactor; the inverse carries 1/(Nx^n Nt). Physical frequencies
// xi = k~/Lx and sigma = m~/T (k~, m~ signed FFT-order indices) are folded
// into operator symbols, never into the transform itself.

namespace fhlab::fields {

using cplx = std::complex<double>;

struct SpaceTimeGrid {
  int dim = 1;                       // spatial dimension, 1 or 2
  std::array<int, 2> nx = {64, 1};   // points per space axis (power of two)
  std::array<double, 2> lx = {1.0, 1.0};
  int nt = 64;                       // time points (power of two)
  double tspan = 1.0;                // window is [-tspan, 0)

  int nspace() const { return dim == 1 ? nx[0] : nx[0] * nx[1]; }
  int total() const { return nspace() * nt; }
  double dx(int axis) const { return lx[axis] / nx[axis]; }
  double dt() const { return tspan / nt; }
  double x_of(int axis, int j) const { return j * dx(axis); }
  double t_of(int j) const { return -tspan + j * dt(); }

  // signed index of FFT bin k on an axis with N points: k for k < N/2,
  // k - N otherwise
  static int signed_index(int k, int n) { return k < n - k ? k : k - n; }
  double xi_of(int axis, int k) const {
    return signed_index(k, nx[axis]) / lx[axis];
  }
  double sigma_of(int k) const { return signed_index(k, nt) / tspan; }

  // flat layout: ((x0 * nx1) + x1) * nt + it, t fastest
  int index(int j0, int j1, int jt) const { return (j0 * nx[1] + j1) * nt + jt; }

  void validate() const;  // throws std::invalid_argument
  bool operator==(const SpaceTimeGrid&) const = default;
};

// Immutable sample/spectrum pair; both representations are materialized at
// construction so reads are trivially thread-safe.
class SpaceTimeField {
 public:
  static SpaceTimeField from_samples(const SpaceTimeGrid& g, std::vector<cplx> samples);
  static SpaceTimeField from_spectrum(const SpaceTimeGrid& g, std::vector<cplx> spectrum);
  static SpaceTimeField zero(const SpaceTimeGrid& g);

  const SpaceTimeGrid& grid() const { return grid_; }
  const std::vector<cplx>& samples() const { return samples_; }
  const std::vector<cplx>& spectrum() const { return spectrum_; }

  double l2_norm() const;       // sqrt(sum |u|^2 dx dt)
  double linf_norm() const;
  double spectral_energy() const;  // Parseval partner of l2_norm^2

 private:
  SpaceTimeGrid grid_;
  std::vector<cplx> samples_;
  std::vector<cplx> spectrum_;
};

// Transform entry points (forward: samples -> spectrum).
std::vector<cplx> dft_forward(const SpaceTimeGrid& g, const std::vector<cplx>& samples);
std::vector<cplx> dft_inverse(const SpaceTimeGrid& g, const std::vector<cplx>& spectrum);

// Lambda_h u(x,t) = u(x, t+h), applied spectrally (phase e^{2 pi i sigma h}).
SpaceTimeField time_shift(const SpaceTimeField& u, double h);

// e^{-tau H} u with symbol e^{-tau((2 pi |xi|)^2 + 2 pi i sigma)}; tau >= 0.
SpaceTimeField heat_semigroup(const SpaceTimeField& u, double tau);

// Largest |signed mode index| / (N/2) over occupied modes; operator
// application expects <= 0.5 (aliasing guard, reported not enforced).
double band_occupancy(const SpaceTimeField& u, double rel_tol = 1e-13);

// Sparse spectral view; coeff is the continuum Fourier coefficient
// (spectrum / (Nx^n Nt)), so the field value is sum coeff * e^{2 pi i(...)}.
struct ModeCoeff {
  std::array<double, 2> xi = {0.0, 0.0};
  double sigma = 0.0;
  cplx coeff;
  cplx symbol_lambda() const;  // (2 pi |xi|)^2 + 2 pi i sigma
};
std::vector<ModeCoeff> sparse_modes(const SpaceTimeField& u, double rel_tol = 1e-13);
cplx evaluate_modes(const std::vector<ModeCoeff>& modes, const double* x, int dim, double t);

// Flat binary container ("FHFL") plus a CSV sample dump. The same container
// with a nonempty y axis carries extension snapshots (see extension.hpp);
// sample count is nspace * max(1, ny) * nt.
void write_fhfl(const std::string& path, const SpaceTimeField& u);
SpaceTimeField read_fhfl(const std::string& path);
void write_csv(const std::string& path, const SpaceTimeField& u);

// low-level container entry points shared with the snapshot writer
void write_fhfl_raw(const std::string& path, const SpaceTimeGrid& g,
                    const std::vector<double>& yaxis, const std::vector<cplx>& data);
void read_fhfl_raw(const std::string& path, SpaceTimeGrid& g, std::vector<double>& yaxis,
                   std::vector<cplx>& data);

}  // namespace fhlab::fields
