#pragma once

#include <random>

#include "strobo/state.hpp"

namespace strobo::test {

// Random coefficients on |k| <= band (Fourier) or degree <= band (Hermite),
// zero elsewhere so products stay resolved.
inline StateVector random_state(const BasisPtr& b, unsigned seed, int band = 1 << 20, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CVector c = CVector::Zero(b->size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(b->mode_x(i)) > band || std::abs(b->mode_y(i)) > band) continue;
    c[i] = scale * Complex(nd(rng), nd(rng));
  }
  return StateVector(b, c);
}

inline double rel_diff(const StateVector& a, const StateVector& b) {
  return l2_norm_and_error(a.basis(), a, b) / std::max(l2_norm(b), 1e-300);
}

}  // namespace strobo::test
