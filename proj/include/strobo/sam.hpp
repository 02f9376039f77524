#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "strobo/splitting.hpp"

namespace strobo {

/// Central first-derivative stencil over whole periods. Weights are kept as
/// exact rationals; weight(-m) = -weight(m).
struct StencilSpec {
  struct Rational {
    long num;
    long den;
    double value() const { return double(num) / double(den); }
  };

  int delta = 4;
  std::vector<int> offsets;        // ascending, zero excluded
  std::vector<Rational> weights;   // matches offsets

  /// delta in {2, 4, 8}.
  static StencilSpec central(int delta);
  int max_offset() const { return offsets.empty() ? 0 : offsets.back(); }
  /// Exact check of sum w = 0, sum w m = 1 and antisymmetry.
  bool moments_exact() const;
};

enum class MacroScheme { RK2, RK4, ImplicitMidpoint };

std::string_view to_string(MacroScheme s);
MacroScheme parse_macro_scheme(std::string_view name);

struct ButcherTableau {
  MacroScheme id = MacroScheme::RK4;
  RMatrix a;
  RVector b;
  RVector c;
  bool is_explicit = true;
  bool is_symmetric = false;

  static ButcherTableau rk2();
  static ButcherTableau rk4();
  static ButcherTableau implicit_midpoint();
  static ButcherTableau for_scheme(MacroScheme s);
  int stages() const { return int(b.size()); }
};

/// SAM run parameters. The macro step is H = final_time / macro_steps, so
/// eps_eff H = T0 / macro_steps for the default horizon T0/eps_eff.
struct SamConfig {
  ProblemSpec problem;
  SplittingScheme micro;
  StencilSpec stencil;
  ButcherTableau tableau;
  double final_time = 0.0;
  long macro_steps = 1;
  double fixed_point_tol = 1e-12;
  int max_iters = 50;
  int record_every = 1;

  /// micro step h = P/micro_n; horizon defaults to p.final_time().
  static SamConfig make(ProblemSpec p, int micro_order, long micro_n, int delta, MacroScheme macro,
                        long macro_steps, double final_time = 0.0,
                        SplitOrdering ordering = SplitOrdering::KineticFirst);

  double macro_step() const { return final_time / double(macro_steps); }
  long micro_steps_per_period() const { return micro.steps_per_period(problem.period()); }
  void validate() const;
};

struct EvalCounters {
  long micro_steps = 0;
  long field_evals = 0;
};

/// F_h(u) = 1/(P eps_eff) sum_m w_m s^m (S_{sign(m) h})^{|m| n}(u), legs summed in
/// ascending offset order. The factor s^m = e^{imPA} maps each leg back to the
/// filtered frame (identity for integer spectra).
class AveragedField {
 public:
  explicit AveragedField(const SamConfig& cfg);
  StateVector operator()(const StateVector& u, EvalCounters* counters = nullptr) const;

 private:
  SplittingPropagator propagator_;
  StencilSpec stencil_;
  long n_;
  double scale_;
  int period_sign_;
};

StateVector averaged_field(const SamConfig& cfg, const StateVector& u);

using VectorField = std::function<StateVector(const StateVector&)>;

/// Explicit RK step of u' = F(u) with step size `step` (= eps_eff H).
StateVector rk_explicit_step(const ButcherTableau& tableau, const VectorField& field, const StateVector& u,
                             double step);

struct MidpointStep {
  StateVector state;
  int iterations = 0;
  double residual = 0.0;
};

/// Implicit midpoint: k = F(u + step/2 k) by fixed-point iteration started at
/// k = F(u), relative l2 tolerance on successive iterates. Throws StepFailure
/// when max_iters is exhausted.
MidpointStep implicit_midpoint_step(const VectorField& field, const StateVector& u, double step, double tol,
                                    int max_iters);

StateVector macro_step_explicit(const SamConfig& cfg, const StateVector& u);
StateVector macro_step_midpoint(const SamConfig& cfg, const StateVector& u);

struct SamReport {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<bool> stroboscopic;   // t is a whole number of periods
  long macro_steps_done = 0;
  long micro_steps = 0;
  long field_evals = 0;
  double wall_time_s = 0.0;
  bool ok = true;
  std::string error;

  const StateVector& final_state() const { return states.back(); }
};

/// Runs the macro integrator over [0, final_time]. Records u_0 and every
/// record_every-th macro state plus the final one. On a midpoint failure the
/// report is returned with ok = false and the states reached so far.
SamReport sam_integrate(const SamConfig& cfg);

/// Approximates psi(t) for kP < t < (k+1)P from the averaged state u_N at t:
/// backward averaged flow over dt = t - kP, then forward micro-integration of
/// the original equation over dt.
StateVector post_process(const SamConfig& cfg, const StateVector& u_N, double t_N);

}  // namespace strobo
