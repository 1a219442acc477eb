#pragma once

#include <complex>
#include <span>

// Complex-argument special functions backing the per-mode extension calculus:
// Euler Gamma on the positive axis, the principal root L(xi,sigma) of the
// space-time symbol, the Macdonald function K_nu, and its normalized form
// Phi_nu(z) = z^nu K_nu(z).
//
// All complex powers and roots use the principal branch, arg in (-pi, pi].
// K_nu / Phi_nu are only supported in the sector |arg z| <= pi/4 that the
// extension operator produces; anything else is a domain_error.

namespace fhlab::specfun {

using cplx = std::complex<double>;

// Gamma(x) for x > 0 via a Lanczos rational approximation.
// Throws std::domain_error for x <= 0.
double gamma_pos(double x);

// Principal root L with L^2 = (2*pi*|xi|)^2 + 2*pi*i*sigma.
// re(L) >= 0 and |arg L| <= pi/4 always.
cplx principal_L(std::span<const double> xi, double sigma);
cplx principal_L_from_symbol(cplx lambda);  // lambda = L^2

// Macdonald function K_nu(z), |nu| <= 2, re(z) > 0, |arg z| <= pi/4.
// Even in nu by construction.
cplx macdonald_k(double nu, cplx z);

// Phi_nu(z) = z^nu K_nu(z), extended by continuity to z = 0 for nu > 0:
// Phi_nu(0) = 2^(nu-1) Gamma(nu).
cplx phi(double nu, cplx z);

// d/dz Phi_nu(z) = -z^nu K_{nu-1}(z).
cplx phi_prime(double nu, cplx z);

// Fixed node count of the Phi quadrature rule (see implementation notes).
inline constexpr int kPhiQuadNodes = 400;

}  // namespace fhlab::specfun
