#pragma once

#include <string>
#include <string_view>

#include "strobo/state.hpp"

namespace strobo {

enum class Model { TorusNLS1D, GrossPitaevskii1D, AnisoTorus2D, AnisoGP2D };

std::string_view to_string(Model m);
/// Accepts the CSV/config identifiers: torus_nls_1d, gp_1d, aniso_torus_2d, aniso_gp_2d.
Model parse_model(std::string_view name);

/// A semilinear Schroedinger problem
///
///   i psi_t = A psi + eps_eff g(psi),   g(w) = M w + c(x) |w|^2 w,
///
/// where A (eigenvalues lambda_k) generates a P-periodic group up to the sign
/// e^{-iPA} = s Id, and M (eigenvalues mu_k) is the slow linear part carried
/// by the 2D models. Immutable value; copies share the basis.
class ProblemSpec {
 public:
  Model model() const { return model_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const SpectralBasis& basis() const { return *basis_; }

  /// Per-coefficient eigenvalues of A.
  const RVector& eigenvalues() const { return lambda_; }
  /// Per-coefficient eigenvalues of the slow linear part M (zero in 1D).
  const RVector& slow_eigenvalues() const { return mu_; }
  /// c(x) on the physical grid: alpha(x) for 1D, 1 or beta for 2D.
  const RVector& coupling() const { return coupling_; }

  /// The small parameter as the user states it (eps in both 1D and 2D).
  double epsilon() const { return epsilon_; }
  /// The factor in front of g: eps for 1D models, eps^2 for 2D models.
  double epsilon_eff() const { return epsilon_eff_; }
  double beta() const { return beta_; }
  double period() const { return period_; }
  double t0() const { return t0_; }
  double final_time() const { return t0_ / epsilon_eff_; }
  /// s in e^{-iPA} = s Id.
  int period_sign() const { return period_sign_; }
  const StateVector& initial_state() const { return initial_; }

  ProblemSpec with_epsilon(double epsilon) const;
  /// Copy with c(x) multiplied by scale (scale = 0 zeroes the cubic term).
  ProblemSpec with_coupling_scale(double scale) const;
  ProblemSpec with_initial_state(StateVector u) const;

  /// Throws ConfigError when a documented invariant is violated.
  void validate() const;

  friend ProblemSpec torus_nls_1d(double, int);
  friend ProblemSpec gross_pitaevskii_1d(double, int);
  friend ProblemSpec aniso_torus_2d(double, int, int);
  friend ProblemSpec aniso_gp_2d(double, int, int, double);

 private:
  ProblemSpec() = default;
  void set_epsilon(double epsilon);

  Model model_ = Model::TorusNLS1D;
  BasisPtr basis_;
  RVector lambda_, mu_, coupling_;
  double epsilon_ = 0.0, epsilon_eff_ = 0.0, beta_ = 0.0;
  double period_ = kTwoPi, t0_ = 0.0;
  int period_sign_ = 1;
  StateVector initial_;
};

// Model catalog.

/// i psi_t = -psi_xx + eps 2cos(2x)|psi|^2 psi on the 2pi-torus,
/// psi_0 = cos x + sin x, T0 = pi/4.
ProblemSpec torus_nls_1d(double eps, int nx = 64);
/// i psi_t = (-1/2 d_xx + (x^2-1)/2) psi + eps |psi|^2 psi, psi_0 = h_0 + h_1, T0 = 2pi.
ProblemSpec gross_pitaevskii_1d(double eps, int max_degree = 40);
/// i psi_t = -psi_yy + eps^2(-psi_xx + |psi|^2 psi), psi_0 = 1 + 2cos x + 2cos y, T0 = 2pi.
ProblemSpec aniso_torus_2d(double eps, int nx = 32, int ny = 32);
/// i psi_t = (-1/2 d_yy + y^2/2) psi + eps^2 (-1/2 d_xx + x^2/2 + beta|psi|^2) psi,
/// psi_0 = h_0(y)(h_0(x) + h_2(x)), T0 = 2pi, P = 2pi.
ProblemSpec aniso_gp_2d(double eps, int max_degree_x = 31, int max_degree_y = 31, double beta = 5.0);

/// Builds a catalog model from its identifier. size_x/size_y are grid sizes
/// for Fourier models and maximum degrees for Hermite models; 0 = default.
ProblemSpec make_model(Model m, double eps, int size_x = 0, int size_y = 0);

// Core operations.

/// e^{-itA} u, exactly.
StateVector free_flow(const ProblemSpec& p, double t, const StateVector& u);
/// g(w) without the eps_eff factor.
StateVector nonlinear_term(const ProblemSpec& p, const StateVector& w);
/// f(t,u) = -i e^{itA} g(e^{-itA} u), so that u' = eps_eff f(t,u).
StateVector filtered_rhs(const ProblemSpec& p, double t, const StateVector& u);

}  // namespace strobo
