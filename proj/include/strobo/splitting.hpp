#pragma once

#include <string_view>
#include <vector>

#include "strobo/problem.hpp"

namespace strobo {

/// Triple-jump weights of the order-4 composition.
struct YoshidaWeights {
  static double outer();   // w1 = 1 / (2 - 2^{1/3})
  static double middle();  // w0 = 1 - 2 w1
};

/// Which sub-flow sits on the outside of the Strang step.
enum class SplitOrdering {
  KineticFirst,    // kinetic(h/2) potential(h) kinetic(h/2)
  PotentialFirst,  // potential(h/2) kinetic(h) potential(h/2)
};

std::string_view to_string(SplitOrdering o);
/// "kpk" or "pkp".
SplitOrdering parse_split_ordering(std::string_view name);

/// Micro-integrator: Strang (order 2) or the Yoshida triple jump (order 4)
/// with step h = P/n. The sign of h gives the direction.
struct SplittingScheme {
  int order = 4;
  double h = 0.0;
  SplitOrdering ordering = SplitOrdering::KineticFirst;

  /// h = direction * period / n.
  static SplittingScheme for_period(int order, double period, long n, int direction = 1,
                                    SplitOrdering ordering = SplitOrdering::KineticFirst);
  /// Number of steps per period; throws ConfigError unless |h| divides P.
  long steps_per_period(double period) const;
  void validate() const;
};

/// Exact flow of the full linear part (A + eps_eff M) over time t.
StateVector kinetic_flow(const ProblemSpec& p, double t, const StateVector& psi);
/// Exact pointwise flow of i psi_t = eps_eff c(x)|psi|^2 psi over time t.
StateVector potential_flow(const ProblemSpec& p, double t, const StateVector& psi);
/// kinetic(h/2) o potential(h) o kinetic(h/2), or the potential-first mirror.
StateVector strang_step(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi);
/// strang(w1 h) o strang(w0 h) o strang(w1 h).
StateVector yoshida4_step(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi);
/// One step of the scheme's order.
StateVector splitting_step(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi);

/// Fused propagator for long runs: adjacent kinetic half-steps are merged and
/// the state stays in preallocated aligned buffers. Agrees with repeated
/// splitting_step to rounding. Immutable; advance() may be called from
/// several threads at once.
class SplittingPropagator {
 public:
  SplittingPropagator(ProblemSpec problem, int order, SplitOrdering ordering = SplitOrdering::KineticFirst);

  const ProblemSpec& problem() const { return problem_; }
  int order() const { return order_; }
  SplitOrdering ordering() const { return ordering_; }

  /// `steps` steps of signed size tau.
  StateVector advance(const StateVector& u, long steps, double tau) const;

  /// States after 1, 2, ..., periods whole periods in the given direction,
  /// using n steps per period.
  std::vector<StateVector> period_snapshots(const StateVector& u, int periods, int direction, long n) const;

 private:
  struct Workspace;
  void run(Workspace& ws, long steps, double tau) const;

  ProblemSpec problem_;
  int order_;
  SplitOrdering ordering_;
  RVector kinetic_rates_;    // lambda_k + eps_eff mu_k
  RVector potential_rates_;  // eps_eff c_j * work density_j
  // One step alternates outer and inner sub-flows: outer[0] inner[0] outer[1] ...
  std::vector<double> outer_fractions_;
  std::vector<double> inner_fractions_;
};

/// (S_{sign(k) h})^{|k| n}(psi): integrates the original equation over k whole
/// periods, forward or backward.
StateVector propagate_periods(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi, int k);

/// Full-interval splitting solution at time p.final_time() (or `final_time`
/// when positive). The step |scheme.h| must divide both P and the horizon.
struct SplittingRun {
  StateVector final_state;
  std::vector<double> sample_times;
  std::vector<StateVector> samples;
  long steps = 0;
};
SplittingRun integrate_splitting(const ProblemSpec& p, const SplittingScheme& scheme, double final_time = 0.0,
                                 double sample_interval = 0.0);

/// Number of steps of size |h| in `duration`; throws unless it is an integer.
long exact_step_count(double duration, double h, const char* what);

}  // namespace strobo
