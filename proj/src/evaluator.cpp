#include "fhlab/evaluator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fhlab::evaluator {

double z_apply(const Evaluator& f, const double* x, double y, double t) {
  const Jet j = f.jet(x, y, t);
  double z = y * j.uy + 2.0 * t * j.ut;
  for (int a = 0; a < f.dim(); ++a) z += x[a] * j.ux[a];
  return z;
}

namespace {

class OneField final : public Evaluator {
 public:
  int dim() const override { return 1; }
  Jet jet(const double*, double, double) const override { return {1.0, {0, 0}, 0, 0}; }
};

class X1Field final : public Evaluator {
 public:
  int dim() const override { return 1; }
  Jet jet(const double* x, double, double) const override {
    return {x[0], {1.0, 0.0}, 0.0, 0.0};
  }
};

class X1X2Field final : public Evaluator {
 public:
  int dim() const override { return 2; }
  Jet jet(const double* x, double, double) const override {
    return {x[0] * x[1], {x[1], x[0]}, 0.0, 0.0};
  }
};

class Y2SField final : public Evaluator {
 public:
  explicit Y2SField(double s) : s_(s) {}
  int dim() const override { return 1; }
  Jet jet(const double*, double y, double) const override {
    Jet j;
    j.u = std::pow(y, 2.0 * s_);
    j.uy = y > 0.0 ? 2.0 * s_ * std::pow(y, 2.0 * s_ - 1.0)
                   : std::numeric_limits<double>::infinity();
    if (y == 0.0) j.u = 0.0;
    return j;
  }

 private:
  double s_;
};

class Poly2Field final : public Evaluator {
 public:
  Poly2Field(int n, double a) : n_(n), a_(a) {}
  int dim() const override { return n_; }
  Jet jet(const double* x, double y, double t) const override {
    Jet j;
    double x2 = 0.0;
    for (int k = 0; k < n_; ++k) {
      x2 += x[k] * x[k];
      j.ux[k] = 2.0 * x[k];
    }
    j.u = x2 + y * y + 2.0 * (n_ + 1 + a_) * t;
    j.uy = 2.0 * y;
    j.ut = 2.0 * (n_ + 1 + a_);
    return j;
  }

 private:
  int n_;
  double a_;
};

class Caloric2Field final : public Evaluator {
 public:
  explicit Caloric2Field(int n) : n_(n) {}
  int dim() const override { return n_; }
  Jet jet(const double* x, double, double t) const override {
    Jet j;
    double x2 = 0.0;
    for (int k = 0; k < n_; ++k) {
      x2 += x[k] * x[k];
      j.ux[k] = 2.0 * x[k];
    }
    j.u = x2 + 2.0 * n_ * t;
    j.ut = 2.0 * n_;
    return j;
  }

 private:
  int n_;
};

// y exp(-(|x|^2 + |t|)/y^2) for t <= 0, extended by 0 to y = 0. Parabolically
// homogeneous of degree one yet flat to infinite order at every (x, 0, t)
// with t < 0.
class CounterexampleField final : public Evaluator {
 public:
  explicit CounterexampleField(int n) : n_(n) {}
  int dim() const override { return n_; }
  Jet jet(const double* x, double y, double t) const override {
    Jet j;
    if (y <= 0.0) return j;
    double x2 = 0.0;
    for (int k = 0; k < n_; ++k) x2 += x[k] * x[k];
    const double q = (x2 + std::abs(t)) / (y * y);
    const double e = std::exp(-q);
    j.u = y * e;
    for (int k = 0; k < n_; ++k) j.ux[k] = -2.0 * x[k] / y * e;
    j.uy = e * (1.0 + 2.0 * q);
    j.ut = (t < 0.0) ? e / y : 0.0;  // d|t|/dt = -1 for t < 0
    return j;
  }

 private:
  int n_;
};

class SuperpositionField final : public Evaluator {
 public:
  explicit SuperpositionField(std::vector<std::pair<double, EvalPtr>> terms)
      : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("superposition: no terms");
    dim_ = 1;
    for (const auto& [c, f] : terms_) dim_ = std::max(dim_, f->dim());
  }
  int dim() const override { return dim_; }
  Jet jet(const double* x, double y, double t) const override {
    Jet acc;
    for (const auto& [c, f] : terms_) {
      const Jet j = f->jet(x, y, t);
      acc.u += c * j.u;
      acc.ux[0] += c * j.ux[0];
      acc.ux[1] += c * j.ux[1];
      acc.uy += c * j.uy;
      acc.ut += c * j.ut;
    }
    return acc;
  }
  double value(const double* x, double y, double t) const override {
    double acc = 0.0;
    for (const auto& [c, f] : terms_) acc += c * f->value(x, y, t);
    return acc;
  }

 private:
  std::vector<std::pair<double, EvalPtr>> terms_;
  int dim_;
};

class RescaledField final : public Evaluator {
 public:
  RescaledField(EvalPtr base, double lambda, double scale)
      : base_(std::move(base)), lam_(lambda), scale_(scale) {}
  int dim() const override { return base_->dim(); }
  Jet jet(const double* x, double y, double t) const override {
    double xs[2] = {x[0] * lam_, base_->dim() == 2 ? x[1] * lam_ : 0.0};
    const Jet j = base_->jet(xs, y * lam_, t * lam_ * lam_);
    Jet out;
    out.u = scale_ * j.u;
    out.ux[0] = scale_ * lam_ * j.ux[0];
    out.ux[1] = scale_ * lam_ * j.ux[1];
    out.uy = scale_ * lam_ * j.uy;
    out.ut = scale_ * lam_ * lam_ * j.ut;
    return out;
  }
  double value(const double* x, double y, double t) const override {
    double xs[2] = {x[0] * lam_, base_->dim() == 2 ? x[1] * lam_ : 0.0};
    return scale_ * base_->value(xs, y * lam_, t * lam_ * lam_);
  }

 private:
  EvalPtr base_;
  double lam_, scale_;
};

}  // namespace

EvalPtr make_one() { return std::make_shared<OneField>(); }
EvalPtr make_x1() { return std::make_shared<X1Field>(); }
EvalPtr make_x1x2() { return std::make_shared<X1X2Field>(); }
EvalPtr make_y2s(double s) { return std::make_shared<Y2SField>(s); }
EvalPtr make_poly2(int n, double a) { return std::make_shared<Poly2Field>(n, a); }
EvalPtr make_caloric2(int n) { return std::make_shared<Caloric2Field>(n); }
EvalPtr make_counterexample(int n) { return std::make_shared<CounterexampleField>(n); }

EvalPtr make_superposition(std::vector<std::pair<double, EvalPtr>> terms) {
  return std::make_shared<SuperpositionField>(std::move(terms));
}

EvalPtr make_rescaled(EvalPtr base, double lambda, double scale) {
  return std::make_shared<RescaledField>(std::move(base), lambda, scale);
}

double builtin_kappa(const std::string& name, double s) {
  if (name == "one") return 0.0;
  if (name == "x1") return 0.5;
  if (name == "x1x2") return 1.0;
  if (name == "y2s") return s;
  if (name == "poly2") return 1.0;
  if (name == "caloric2") return 1.0;
  if (name == "counterexample_f") return 0.5;  // degree 1 = 2 kappa
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace fhlab::evaluator
