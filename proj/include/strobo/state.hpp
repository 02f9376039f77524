#pragma once

#include "strobo/spectral.hpp"

namespace strobo {

/// Spectral coefficients of a wavefunction together with the basis they
/// live on. Value type; copies share the (immutable) basis.
class StateVector {
 public:
  StateVector() = default;
  StateVector(BasisPtr basis, CVector coeffs);

  static StateVector zeros(BasisPtr basis);
  /// Unit coefficient on a single mode.
  static StateVector mode(BasisPtr basis, int kx, int ky = 0);

  const SpectralBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const CVector& coeffs() const { return coeffs_; }
  CVector& mutable_coeffs() { return coeffs_; }
  Eigen::Index size() const { return coeffs_.size(); }

  Complex operator[](Eigen::Index i) const { return coeffs_[i]; }

  bool all_finite() const;
  /// Throws ConfigError unless other lives on a basis with the same layout.
  void require_same_basis(const StateVector& other) const;
  void require_basis(const SpectralBasis& basis) const;

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(Complex s);

 private:
  BasisPtr basis_;
  CVector coeffs_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(Complex s, StateVector a);

/// Discrete weighted l2 norm on grid values (dx or omega_j weights).
double l2_norm(const StateVector& u);

/// Discrete weighted l2 distance between two states on the same basis.
double l2_norm_and_error(const SpectralBasis& b, const StateVector& u, const StateVector& v);

}  // namespace strobo
