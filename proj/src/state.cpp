#include "strobo/state.hpp"

#include <cmath>

namespace strobo {

StateVector::StateVector(BasisPtr basis, CVector coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ConfigError("StateVector: null basis");
  if (coeffs_.size() != basis_->size())
    throw ConfigError("StateVector: " + std::to_string(coeffs_.size()) + " coefficients for a basis of size " +
                      std::to_string(basis_->size()));
}

StateVector StateVector::zeros(BasisPtr basis) {
  const Eigen::Index n = basis->size();
  return StateVector(std::move(basis), CVector::Zero(n));
}

StateVector StateVector::mode(BasisPtr basis, int kx, int ky) {
  StateVector u = zeros(basis);
  u.coeffs_[basis->find_mode(kx, ky)] = 1.0;
  return u;
}

bool StateVector::all_finite() const { return coeffs_.allFinite(); }

void StateVector::require_basis(const SpectralBasis& basis) const {
  if (!basis_ || !basis_->same_layout(basis)) throw ConfigError("state does not live on the expected basis");
}

void StateVector::require_same_basis(const StateVector& other) const {
  if (!other.basis_) throw ConfigError("state has no basis");
  require_basis(*other.basis_);
}

StateVector& StateVector::operator+=(const StateVector& o) {
  require_same_basis(o);
  coeffs_ += o.coeffs_;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  require_same_basis(o);
  coeffs_ -= o.coeffs_;
  return *this;
}

StateVector& StateVector::operator*=(Complex s) {
  coeffs_ *= s;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(Complex s, StateVector a) { return a *= s; }

double l2_norm(const StateVector& u) {
  const CVector grid = u.basis().to_grid(u.coeffs());
  return std::sqrt((grid.cwiseAbs2().array() * u.basis().weights().array()).sum());
}

double l2_norm_and_error(const SpectralBasis& b, const StateVector& u, const StateVector& v) {
  u.require_basis(b);
  v.require_basis(b);
  const CVector diff = b.to_grid(u.coeffs() - v.coeffs());
  return std::sqrt((diff.cwiseAbs2().array() * b.weights().array()).sum());
}

}  // namespace strobo
