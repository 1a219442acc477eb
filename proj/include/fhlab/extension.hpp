#pragma once

#include <array>
#include <vector>

#include "fhlab/evaluator.hpp"
#include "fhlab/fields.hpp"
#include "fhlab/fracheat.hpp"

// Degenerate extension problem on the upper half space, solved per Fourier
// mode: the mode with symbol root L extends in y as
//   hat U(y) = Phi_s(L y) / Phi_s(0) * hat u,
// which solves y^2 Y'' + a y Y' - L^2 y^2 Y = 0 with Y(0) = hat u and decay
// at infinity. The weighted Neumann derivative recovers the fractional heat
// operator of the boundary field.

namespace fhlab::extension {

using evaluator::Evaluator;
using evaluator::Jet;
using fields::cplx;
using fields::SpaceTimeField;
using fracheat::FracConfig;

struct YGrid {
  std::vector<double> nodes;  // strictly increasing, in (0, ymax]

  static YGrid geometric(int m = 64, double y0 = 1e-4, double ymax = 12.0);
  void validate() const;
};

class ExtensionField final : public Evaluator {
 public:
  ExtensionField(const SpaceTimeField& u, FracConfig cfg, YGrid ygrid);

  int dim() const override { return grid_.dim; }
  Jet jet(const double* x, double y, double t) const override;
  double value(const double* x, double y, double t) const override {
    return value_c(x, y, t).real();
  }

  cplx value_c(const double* x, double y, double t) const;

  const FracConfig& cfg() const { return cfg_; }
  const YGrid& ygrid() const { return ygrid_; }
  const fields::SpaceTimeGrid& grid() const { return grid_; }
  const std::vector<fields::ModeCoeff>& modes() const { return modes_; }

  // per-mode coefficient Phi_s(L y)/Phi_s(0) and its y-derivative
  cplx mode_profile(int mode, double y) const;
  cplx mode_profile_dy(int mode, double y) const;

  // sample tensor U(x_i, y_j, t_k) on grid x/t nodes and the YGrid
  // (layout x-major, then y, then t); built on first request
  const std::vector<double>& samples() const;

 private:
  fields::SpaceTimeGrid grid_;
  FracConfig cfg_;
  YGrid ygrid_;
  std::vector<fields::ModeCoeff> modes_;
  std::vector<cplx> mode_L_;
  mutable std::vector<double> cache_;
};

ExtensionField extend(const SpaceTimeField& u, const FracConfig& cfg, const YGrid& ygrid);

struct NeumannTrace {
  SpaceTimeField trace;              // H^s u recovered from the spectral limit
  double grid_spectral_discrepancy;  // rel. L2 gap to the Richardson route
};

// Weighted Neumann limit, both ways: (i) exact per-mode closed form through
// the derivative of the profile at 0+, (ii) extrapolation in y of
// y^a dU/dy from the smallest YGrid nodes with the known boundary exponents
// {2-2s, 2}. Returns (i) and records the gap to (ii).
NeumannTrace neumann_trace(const ExtensionField& ext);

struct Box {
  // closed sample box in (x, y, t); x1 range ignored when dim == 1
  std::array<double, 2> x0, x1, y, t;
  std::array<int, 4> samples = {6, 6, 6, 6};
};

// Max-norm of the discrete residual y^a U_t - div(y^a grad U) over the box
// using centered differences of width h on the evaluator.
double pde_residual(const Evaluator& U, double a, const Box& box, double h);

struct ResidualOrder {
  double res_h, res_h2;
  double order;  // log2(res_h / res_h2); NaN when both below the exact floor
  bool exact;    // both residuals under floor (polynomial-type fields)
};
ResidualOrder pde_residual_order(const Evaluator& U, double a, const Box& box, double h,
                                 double exact_floor = 1e-7);

struct Probe {
  std::array<double, 2> x = {0.0, 0.0};
  double y = 0.5;
  double t = -0.3;
};

// Snapshot of the sample tensor U(x_i, y_j, t_k) in the fields container
// with the YGrid as the extra y-axis header.
void write_snapshot(const std::string& path, const ExtensionField& ext);

struct Snapshot {
  fields::SpaceTimeGrid grid;
  std::vector<double> yaxis;
  std::vector<double> values;  // x-major, then y, then t
};
Snapshot read_snapshot(const std::string& path);

// Independent route to U via the subordination representation
//   U(x,y,t) = y^(2s)/(4^s Gamma(s)) int_0^inf tau^(-1-s) e^(-y^2/(4 tau))
//              [e^(-tau H) u](x,t) dtau,
// evaluated per mode on a rotated contour. Returns the max relative
// deviation from the Macdonald-profile evaluation over the probes.
double poisson_check(const SpaceTimeField& u, const FracConfig& cfg,
                     const std::vector<Probe>& probes);

}  // namespace fhlab::extension
