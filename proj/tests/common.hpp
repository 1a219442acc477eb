#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fhlab/fields.hpp"

namespace testutil {

using fhlab::fields::cplx;
using fhlab::fields::SpaceTimeField;
using fhlab::fields::SpaceTimeGrid;

inline SpaceTimeGrid grid64(int dim = 1) {
  SpaceTimeGrid g;
  g.dim = dim;
  g.nx = {64, dim == 2 ? 64 : 1};
  g.lx = {2.0, 2.0};
  g.nt = 64;
  g.tspan = 1.0;
  return g;
}

// inserts the continuum coefficient c at signed mode (k0, k1, kt)
inline void put_mode(const SpaceTimeGrid& g, std::vector<cplx>& sp, int k0, int k1, int kt,
                     cplx c) {
  const int j0 = (k0 % g.nx[0] + g.nx[0]) % g.nx[0];
  const int j1 = (k1 % g.nx[1] + g.nx[1]) % g.nx[1];
  const int jt = (kt % g.nt + g.nt) % g.nt;
  sp[g.index(j0, j1, jt)] += c * static_cast<double>(g.total());
}

// the positive real five-mode field used across the suites
inline SpaceTimeField five_mode_field(const SpaceTimeGrid& g) {
  std::vector<cplx> sp(g.total(), 0.0);
  put_mode(g, sp, 0, 0, 0, {2.2, 0.0});
  put_mode(g, sp, 1, 0, 0, {0.4, 0.0});
  put_mode(g, sp, -1, 0, 0, {0.4, 0.0});
  put_mode(g, sp, 1, 0, 1, {0.15, 0.1});
  put_mode(g, sp, -1, 0, -1, {0.15, -0.1});
  return SpaceTimeField::from_spectrum(g, std::move(sp));
}

inline SpaceTimeField single_mode(const SpaceTimeGrid& g, int k0, int kt, cplx c = 1.0) {
  std::vector<cplx> sp(g.total(), 0.0);
  put_mode(g, sp, k0, 0, kt, c);
  return SpaceTimeField::from_spectrum(g, std::move(sp));
}

inline double rel_l2(const SpaceTimeField& a, const SpaceTimeField& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.grid().total(); ++i) {
    num += std::norm(a.samples()[i] - b.samples()[i]);
    den += std::norm(b.samples()[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace testutil
