#pragma once

#include <vector>

// One-dimensional rules used across the lab. Every rule returns nodes and
// weights such that  sum_i w_i f(x_i)  approximates the target integral of
// the *smooth factor* f; singular weight factors are folded into w.

namespace fhlab::quad {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

// int_{-inf}^{inf} e^{-x^2} f(x) dx
Rule1D gauss_hermite(int n);

// int_0^1 t^beta f(t) dt, beta > -1
Rule1D gauss_jacobi01(int n, double beta);

// int_0^inf e^{-t} f(t) dt
Rule1D gauss_laguerre(int n);

// int_0^inf y^a e^{-y^2} f(y) dy, a > -1. Double-exponential map
// y = exp(u - exp(-u)); spectrally accurate even when f itself carries an
// integrable power of y at the origin, which fixed Gauss rules cannot
// absorb.
Rule1D halfline_gaussian_weight(int n, double a);

// int_0^1 f(w) dw via tanh-sinh; tolerates integrable endpoint powers.
Rule1D tanh_sinh01(int n);

}  // namespace fhlab::quad
