#include "strobo/problem.hpp"

#include <cmath>

namespace strobo {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::TorusNLS1D: return "torus_nls_1d";
    case Model::GrossPitaevskii1D: return "gp_1d";
    case Model::AnisoTorus2D: return "aniso_torus_2d";
    case Model::AnisoGP2D: return "aniso_gp_2d";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::TorusNLS1D, Model::GrossPitaevskii1D, Model::AnisoTorus2D, Model::AnisoGP2D})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

void ProblemSpec::set_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  epsilon_ = epsilon;
  const bool two_d = model_ == Model::AnisoTorus2D || model_ == Model::AnisoGP2D;
  epsilon_eff_ = two_d ? epsilon * epsilon : epsilon;
}

ProblemSpec ProblemSpec::with_epsilon(double epsilon) const {
  ProblemSpec p = *this;
  p.set_epsilon(epsilon);
  return p;
}

ProblemSpec ProblemSpec::with_coupling_scale(double scale) const {
  ProblemSpec p = *this;
  p.coupling_ *= scale;
  return p;
}

ProblemSpec ProblemSpec::with_initial_state(StateVector u) const {
  u.require_basis(*basis_);
  ProblemSpec p = *this;
  p.initial_ = std::move(u);
  return p;
}

void ProblemSpec::validate() const {
  if (!basis_) throw ConfigError("problem has no basis");
  if (!(epsilon_eff_ > 0.0)) throw ConfigError("epsilon_eff must be positive");
  if (!(period_ > 0.0)) throw ConfigError("period must be positive");
  if (lambda_.size() != basis_->size() || mu_.size() != basis_->size())
    throw ConfigError("eigenvalue arrays do not match the basis");
  if (coupling_.size() != basis_->grid_size()) throw ConfigError("coupling does not match the grid");
  // e^{-iP lambda_k} must equal the period sign for every mode.
  for (Eigen::Index k = 0; k < lambda_.size(); ++k) {
    const double turns = lambda_[k] * period_ / kTwoPi;
    const double frac = turns - std::floor(turns);
    const double expected = period_sign_ == 1 ? 0.0 : 0.5;
    if (std::abs(frac - expected) > 1e-12 && std::abs(frac - expected - 1.0) > 1e-12)
      throw ConfigError("spectrum is not consistent with the period");
  }
  initial_.require_basis(*basis_);
}

ProblemSpec torus_nls_1d(double eps, int nx) {
  ProblemSpec p;
  p.model_ = Model::TorusNLS1D;
  p.basis_ = SpectralBasis::fourier_1d(nx);
  p.set_epsilon(eps);
  const auto& b = *p.basis_;
  p.lambda_.resize(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) p.lambda_[i] = double(b.mode_x(i)) * b.mode_x(i);
  p.mu_ = RVector::Zero(b.size());
  p.coupling_ = (2.0 * (2.0 * b.axis_x().array()).cos()).matrix();
  p.t0_ = kPi / 4.0;
  CVector c = CVector::Zero(b.size());
  c[b.find_mode(1)] = Complex(0.5, -0.5);
  c[b.find_mode(-1)] = Complex(0.5, 0.5);
  p.initial_ = StateVector(p.basis_, std::move(c));
  return p;
}

ProblemSpec gross_pitaevskii_1d(double eps, int max_degree) {
  ProblemSpec p;
  p.model_ = Model::GrossPitaevskii1D;
  p.basis_ = SpectralBasis::hermite_1d(max_degree);
  p.set_epsilon(eps);
  const auto& b = *p.basis_;
  p.lambda_.resize(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) p.lambda_[i] = b.mode_x(i);
  p.mu_ = RVector::Zero(b.size());
  p.coupling_ = RVector::Ones(b.grid_size());
  p.t0_ = kTwoPi;
  CVector c = CVector::Zero(b.size());
  c[0] = 1.0;
  if (b.size() > 1) c[1] = 1.0;
  p.initial_ = StateVector(p.basis_, std::move(c));
  return p;
}

ProblemSpec aniso_torus_2d(double eps, int nx, int ny) {
  ProblemSpec p;
  p.model_ = Model::AnisoTorus2D;
  p.basis_ = SpectralBasis::fourier_2d(nx, ny);
  p.set_epsilon(eps);
  const auto& b = *p.basis_;
  p.lambda_.resize(b.size());
  p.mu_.resize(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    p.lambda_[i] = double(b.mode_y(i)) * b.mode_y(i);
    p.mu_[i] = double(b.mode_x(i)) * b.mode_x(i);
  }
  p.coupling_ = RVector::Ones(b.grid_size());
  p.t0_ = kTwoPi;
  CVector c = CVector::Zero(b.size());
  for (auto [kx, ky] : {std::pair{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}) c[b.find_mode(kx, ky)] = 1.0;
  p.initial_ = StateVector(p.basis_, std::move(c));
  return p;
}

ProblemSpec aniso_gp_2d(double eps, int max_degree_x, int max_degree_y, double beta) {
  if (max_degree_x < 2) throw ConfigError("aniso_gp_2d: need max_degree_x >= 2 for the initial datum");
  ProblemSpec p;
  p.model_ = Model::AnisoGP2D;
  p.basis_ = SpectralBasis::hermite_2d(max_degree_x, max_degree_y);
  p.set_epsilon(eps);
  const auto& b = *p.basis_;
  p.lambda_.resize(b.size());
  p.mu_.resize(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    p.lambda_[i] = b.mode_y(i) + 0.5;
    p.mu_[i] = b.mode_x(i) + 0.5;
  }
  p.beta_ = beta;
  p.coupling_ = RVector::Constant(b.grid_size(), beta);
  p.t0_ = kTwoPi;
  // e^{-2 pi i (k + 1/2)} = -1; the cubic term is odd, so f(t, .) is still
  // 2pi-periodic.
  p.period_sign_ = -1;
  CVector c = CVector::Zero(b.size());
  c[b.find_mode(0, 0)] = 1.0;
  c[b.find_mode(2, 0)] = 1.0;
  p.initial_ = StateVector(p.basis_, std::move(c));
  return p;
}

ProblemSpec make_model(Model m, double eps, int size_x, int size_y) {
  switch (m) {
    case Model::TorusNLS1D: return torus_nls_1d(eps, size_x > 0 ? size_x : 64);
    case Model::GrossPitaevskii1D: return gross_pitaevskii_1d(eps, size_x > 0 ? size_x : 40);
    case Model::AnisoTorus2D: return aniso_torus_2d(eps, size_x > 0 ? size_x : 32, size_y > 0 ? size_y : 32);
    case Model::AnisoGP2D: return aniso_gp_2d(eps, size_x > 0 ? size_x : 31, size_y > 0 ? size_y : 31);
  }
  throw ConfigError("unknown model");
}

StateVector free_flow(const ProblemSpec& p, double t, const StateVector& u) {
  u.require_basis(p.basis());
  if (t == 0.0) return u;
  CVector c = u.coeffs();
  const RVector& lambda = p.eigenvalues();
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -t * lambda[k]);
  return StateVector(u.basis_ptr(), std::move(c));
}

StateVector nonlinear_term(const ProblemSpec& p, const StateVector& w) {
  w.require_basis(p.basis());
  const SpectralBasis& b = p.basis();
  AlignedBuffer coeffs(b.size()), grid(b.grid_size());
  std::copy(w.coeffs().data(), w.coeffs().data() + b.size(), coeffs.data());
  b.synthesize(coeffs, grid);
  const RVector& density = b.work_density();
  const RVector& c = p.coupling();
  for (Eigen::Index j = 0; j < b.grid_size(); ++j) grid[j] *= c[j] * density[j] * std::norm(grid[j]);
  b.analyze(grid, coeffs);
  CVector out = Eigen::Map<const CVector>(coeffs.data(), b.size());
  out += (p.slow_eigenvalues().array() * w.coeffs().array()).matrix();
  return StateVector(w.basis_ptr(), std::move(out));
}

StateVector filtered_rhs(const ProblemSpec& p, double t, const StateVector& u) {
  StateVector g = nonlinear_term(p, free_flow(p, t, u));
  g = free_flow(p, -t, g);
  g *= Complex(0.0, -1.0);
  return g;
}

}  // namespace strobo
