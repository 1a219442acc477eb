#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

// Real-valued fields on the upper half space (x, y, t), y >= 0, exposed as
// value + first derivatives. Closed-form solutions of the weighted equation
// y^a U_t = div(y^a grad U) live here; spectral extensions implement the
// same interface in extension.hpp.

namespace fhlab::evaluator {

struct Jet {
  double u = 0.0;
  std::array<double, 2> ux = {0.0, 0.0};
  double uy = 0.0;
  double ut = 0.0;
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual int dim() const = 0;  // spatial dimension n (1 or 2)
  virtual Jet jet(const double* x, double y, double t) const = 0;
  // value-only path; overridden where the derivative jet is singular at y=0
  virtual double value(const double* x, double y, double t) const { return jet(x, y, t).u; }
};

using EvalPtr = std::shared_ptr<const Evaluator>;

// Generator of the parabolic dilation group: Zf = <X, grad f> + 2 t f_t.
double z_apply(const Evaluator& f, const double* x, double y, double t);

// Builtins. kappa() is the parabolic homogeneity degree divided by two,
// i.e. the exact frequency value of the field.
EvalPtr make_one();                    // kappa 0
EvalPtr make_x1();                     // kappa 1/2
EvalPtr make_x1x2();                   // kappa 1, needs dim 2
EvalPtr make_y2s(double s);            // y^(2s), kappa s
EvalPtr make_poly2(int n, double a);   // |x|^2 + y^2 + 2(n+1+a) t, kappa 1
EvalPtr make_caloric2(int n);          // |x|^2 + 2 n t, y-independent, kappa 1
EvalPtr make_counterexample(int n);    // y exp(-(|x|^2+|t|)/y^2), degree 1

// c1 * f1 + c2 * f2 + ...
EvalPtr make_superposition(std::vector<std::pair<double, EvalPtr>> terms);

// f(lambda X, lambda^2 t) * scale
EvalPtr make_rescaled(EvalPtr base, double lambda, double scale);

// Known homogeneity degree 2*kappa for the builtins above, NaN if unknown.
double builtin_kappa(const std::string& name, double s);

}  // namespace fhlab::evaluator
