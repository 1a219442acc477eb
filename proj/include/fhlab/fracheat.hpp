#pragma once

#include "fhlab/fields.hpp"

// The fractional heat operator by space-time multiplier and by subordination
// quadrature, the parabolic Sobolev norm, and the manufactured-potential
// generator producing exact (u, V) solution pairs.

namespace fhlab::fracheat {

using fields::cplx;
using fields::SpaceTimeField;

struct FracConfig {
  double s = 0.5;  // order, in (0,1)

  double a() const { return 1.0 - 2.0 * s; }
  // Gamma(1-s) / (2^(2s-1) Gamma(s)); equals 1 at s = 1/2.
  double c_s() const;

  void validate() const;  // throws std::domain_error unless 0 < s < 1
};

// Per-mode multiplier ((2 pi |xi|)^2 + 2 pi i sigma)^s, principal branch.
SpaceTimeField frac_heat_multiplier(const SpaceTimeField& u, const FracConfig& cfg);

// Subordination route: -(s/Gamma(1-s)) int_0^inf tau^(-s-1)
// [e^{-tau H} Lambda_{-tau} u - u] dtau, evaluated by quadrature per mode.
// The singular part on (0, tau*) subtracts the linear term analytically and
// integrates the remainder against a Gauss-Jacobi rule; the tail uses a
// rotated Gauss-Laguerre contour.
struct BalakrishnanQuad {
  int singular_nodes = 48;
  int tail_nodes = 64;
  double split = 1.0;  // tau* after rescaling to the unit-modulus symbol
};
SpaceTimeField frac_heat_balakrishnan(const SpaceTimeField& u, const FracConfig& cfg,
                                      const BalakrishnanQuad& quad = {});

// Scalar version of the subordination identity; the field operator applies
// this per mode. Exposed for direct testing against lambda^s.
cplx balakrishnan_symbol(cplx lambda, double s, const BalakrishnanQuad& quad = {});

// sqrt( Lx^n T * sum_m (1 + |L_m|^2)^(2s) |c_m|^2 ) over continuum Fourier
// coefficients c_m; always >= the plain L2 norm.
double parabolic_sobolev_norm(const SpaceTimeField& u, const FracConfig& cfg);

struct PotentialField {
  SpaceTimeField v;
  double bound = 0.0;       // realized max |V|
  double grad_bound = 0.0;  // realized max |grad_x V| (diagnostic)
};

// Inverts the solution relation so that V := H^s u / (c_s u) makes (u, V)
// an exact pair with H^s u = c_s V u on the grid. Requires min |u| >= floor.
PotentialField manufactured_potential(const SpaceTimeField& u, const FracConfig& cfg,
                                      double floor);

}  // namespace fhlab::fracheat
