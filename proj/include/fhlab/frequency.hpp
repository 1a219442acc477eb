#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fhlab/evaluator.hpp"
#include "fhlab/quadrature.hpp"

// Gaussian-weighted functionals of half-space fields and the frequency
// machinery built on them: the slice quantities h(t), i(t), the averaged
// height/energy/frequency H, I, N, N1 over the strips -r^2 < t < 0, the
// adjusted monotone quantity, and the single-time centered variants.
//
// Normalization: integrals over the half space carry a factor 2 (the weight
// |y|^a counted over the even reflection), so the a = 0 kernel has unit
// mass and h(1, t) = 1 at s = 1/2.

namespace fhlab::frequency {

using evaluator::Evaluator;

struct BackwardGaussian {
  std::array<double, 2> center_x = {0.0, 0.0};
  double center_t = 0.0;
  int n = 1;  // boundary dimension; the kernel lives on n+1 coordinates

  // full kernel at (X, t) = (x, y, t), t < center_t
  double value(const double* x, double y, double t) const;
  double g_factor(const double* x, double t) const;  // boundary heat kernel
  double k_factor(double y, double t) const;         // 1-d factor in y
};

// Density W(x,t) u(x,t)^2 entering the boundary part of the energy; W is
// the coefficient of the weighted Neumann condition of the extension.
using BoundaryDensity = std::function<double(const double* x, double t)>;

struct GaussQuadSpec {
  int hermite_nodes = 48;
  int y_nodes = 140;
  int time_nodes = 96;
};

struct Functionals {
  double H = 0.0, I = 0.0, N = 0.0, N1 = 0.0;
  double I_alt = 0.0;     // (1/2r^2) int y^a U ZU G over the strip
  double boundary = 0.0;  // (1/r^2) int |t| W u^2 G over the boundary strip
  double cs_gap = 0.0;    // strip Cauchy-Schwarz: ZZ*M - (UZ)^2
  double cs_scale = 0.0;  // ZZ*M, for relative slack
  bool n_defined = true;  // false when H fell under the degeneracy floor
};

struct CenteredTriple {
  double h = 0.0, i = 0.0, n = 0.0;
  bool n_defined = true;
};

struct FirstVariation {
  std::vector<double> dr;        // the three steps used
  std::vector<double> residual;  // |FD H' - (4/r) I - (a/r) H|
  double order = 0.0;            // log2 fit of residual decay
};

struct FrequencyCurve {
  std::vector<double> r, H, I, N, N1, psi, adjusted, dH_fd, dH_formula;
  std::vector<std::string> flag;  // "ok" or "H-degenerate"
  double C = 0.0;
  bool monotone = false;    // verdict for the adjusted values
  double min_increment = 0.0;
};

double psi_weight(double r, double a);  // int_0^r t^-a dt = r^(1-a)/(1-a)

class FrequencyEngine {
 public:
  FrequencyEngine(int n, double a, GaussQuadSpec spec = {});

  int dim() const { return n_; }
  double weight_exponent() const { return a_; }

  // slice quantities at fixed t < 0 (kernel centered at the origin)
  double height(const Evaluator& U, double t) const;
  double energy_t(const Evaluator& U, const BoundaryDensity* bdry, double t) const;

  // strip averages over -r^2 < t < 0
  Functionals averaged(const Evaluator& U, const BoundaryDensity* bdry, double r) const;

  // single-time quantities centered at (0, t0), t0 < 0; r must satisfy
  // |t0| + r^2 < min((|t0|+1)/2, 2|t0|)
  CenteredTriple centered(const Evaluator& U0, double t0, double r) const;

  FirstVariation first_variation_check(const Evaluator& U, const BoundaryDensity* bdry,
                                       double r, double dr) const;

  FrequencyCurve adjusted_frequency_curve(const Evaluator& U, const BoundaryDensity* bdry,
                                          const std::vector<double>& rs, double C,
                                          bool with_fd = true) const;

  // smallest C (bisection, resolution) making the adjusted curve
  // nondecreasing on the sampled r; requires N > -1 on the samples
  double calibrate_C(const std::vector<double>& rs, const std::vector<double>& Ns,
                     double resolution = 1e-3, double slack = 1e-8) const;

  // raw weighted slice integrals (used by rescaling identities and tests)
  struct Slice {
    double mass = 0.0;  // int y^a U^2 G
    double dir = 0.0;   // int y^a |grad U|^2 G
    double uzu = 0.0;   // int y^a U ZU G
    double zz = 0.0;    // int y^a (ZU)^2 G
  };
  Slice slice(const Evaluator& U, double t_eval, double tau, double t_center = 0.0) const;
  double boundary_slice(const BoundaryDensity& f, double t_eval, double tau) const;

  double degeneracy_floor = 1e-14;

 private:
  int n_;
  double a_;
  GaussQuadSpec spec_;
  quad::Rule1D hermite_, yrule_, trule_;
};

// exp(C psi(r)) * (N(r) + C psi(r))
double adjusted_value(double N, double r, double a, double C);

}  // namespace fhlab::frequency
