#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fhlab/evaluator.hpp"
#include "fhlab/fracheat.hpp"
#include "fhlab/frequency.hpp"

// Parabolic rescalings and the quantities extracted from them: exact
// rescaling identities, Cauchy-decay of the rescaling sequence with a
// fitted homogeneity degree, vanishing-order estimation over shrinking
// cylinders, the height growth bound, and the scale-invariant Harnack
// quotient experiment.

namespace fhlab::blowup {

using evaluator::EvalPtr;
using fields::SpaceTimeField;
using fracheat::FracConfig;
using frequency::FrequencyEngine;

struct ParabolicDilation {
  double lambda = 1.0;
  void apply(const double* x, double y, double t, int n, double* xo, double& yo,
             double& to) const {
    for (int k = 0; k < n; ++k) xo[k] = lambda * x[k];
    yo = lambda * y;
    to = lambda * lambda * t;
  }
};

// U_r(X,t) = r^(a/2) U(rX, r^2 t) / sqrt(H(U,r)); H_r must be positive.
EvalPtr almgren_rescale(EvalPtr base, double r, double H_r, double a);

struct BlowupReport {
  std::vector<double> r;
  std::vector<double> H;              // H(U, r)
  std::vector<double> distance;       // Gaussian strip distance to previous rescaling
  std::vector<double> h_norm;         // H(U_r, 1), should be 1
  std::vector<double> kappa_running;  // consecutive log-slope estimate
  double kappa_hat = 0.0;             // fit over the window of smallest r
  double n_smallest = 0.0;            // N(U, r_min) for comparison
};

// r_list must decrease; fit_window counts the smallest radii used for the
// power-law fit of log H against log r (slope = 4 kappa + a).
BlowupReport blowup_sequence(const EvalPtr& U, const frequency::BoundaryDensity* bdry,
                             std::vector<double> r_list, const FrequencyEngine& engine,
                             int fit_window = 5);

// sup of |f| over the lower cylinder {|X - X0| <= r} x (t0 - r^2, t0] by
// dense sampling with one refinement step. thick = include the y axis in
// the ball (clipped to y >= 0); otherwise y is fixed at X0[2].
using PointFn = std::function<double(const double* x, double y, double t)>;
double cylinder_sup(const PointFn& f, int n, bool thick, const std::array<double, 3>& X0,
                    double t0, double r, int density = 24);

struct VanishingOrderReport {
  std::vector<double> r, sup, local_slope;
  double fitted_order = 0.0;
  bool infinite = false;  // sup underflowed the floor on the smallest radii
};

VanishingOrderReport vanishing_order(const PointFn& f, int n, bool thick,
                                     const std::array<double, 3>& center, double t0,
                                     std::vector<double> r_list, double floor = 1e-14,
                                     double order_cap = 8.0);

// convenience overload sampling a boundary space-time field at its nodes
VanishingOrderReport vanishing_order(const SpaceTimeField& u, const std::array<double, 2>& x0,
                                     double t0, std::vector<double> r_list,
                                     double floor = 1e-14);

struct NondegeneracyVerdict {
  bool holds = false;
  double nbar = 0.0;       // max sampled adjusted frequency
  double min_slack = 0.0;  // min over r of log H(r) - bound
};

// H(r) >= H(r0) (r/r0)^(4 nbar + a) at every sampled r of the curve.
NondegeneracyVerdict nondegeneracy_check(const frequency::FrequencyCurve& curve, double r0,
                                         double a, double tol = 1e-6);

struct HarnackReport {
  std::vector<double> r, quotient;
  double spread = 0.0;            // (max - min) / mid of the quotient
  double consistency_resid = 0.0; // rel. L2 of H^s u - (V u + psi)
  double psi_norm = 0.0;
};

// Empirical constant sup / (inf + r^2s ||psi||) per radius for u >= 0 with
// H^s u = V u + psi. Throws if u is negative on the grid or the triple is
// inconsistent beyond 1e-6.
HarnackReport harnack_quotient(const SpaceTimeField& u, const SpaceTimeField& V,
                               const SpaceTimeField& psi, const FracConfig& cfg,
                               const std::vector<double>& rs);

}  // namespace fhlab::blowup
