#include "strobo/sam.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace strobo {

StencilSpec StencilSpec::central(int delta) {
  StencilSpec s;
  s.delta = delta;
  std::vector<StencilSpec::Rational> positive;
  switch (delta) {
    case 2: positive = {{1, 2}}; break;
    case 4: positive = {{2, 3}, {-1, 12}}; break;
    case 8: positive = {{4, 5}, {-1, 5}, {4, 105}, {-1, 280}}; break;
    default: throw ConfigError("stencil order must be 2, 4 or 8");
  }
  const int m = int(positive.size());
  for (int i = m; i >= 1; --i) {
    s.offsets.push_back(-i);
    s.weights.push_back({-positive[i - 1].num, positive[i - 1].den});
  }
  for (int i = 1; i <= m; ++i) {
    s.offsets.push_back(i);
    s.weights.push_back(positive[i - 1]);
  }
  return s;
}

bool StencilSpec::moments_exact() const {
  long den = 1;
  for (const auto& w : weights) den = std::lcm(den, w.den);
  long sum = 0, first = 0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const long scaled = weights[i].num * (den / weights[i].den);
    sum += scaled;
    first += scaled * offsets[i];
  }
  bool antisymmetric = true;
  const std::size_t n = offsets.size();
  for (std::size_t i = 0; i < n; ++i)
    antisymmetric = antisymmetric && offsets[i] == -offsets[n - 1 - i] &&
                    weights[i].num * weights[n - 1 - i].den == -weights[n - 1 - i].num * weights[i].den;
  return sum == 0 && first == den && antisymmetric;
}

std::string_view to_string(MacroScheme s) {
  switch (s) {
    case MacroScheme::RK2: return "RK2";
    case MacroScheme::RK4: return "RK4";
    case MacroScheme::ImplicitMidpoint: return "midpoint";
  }
  return "unknown";
}

MacroScheme parse_macro_scheme(std::string_view name) {
  for (MacroScheme s : {MacroScheme::RK2, MacroScheme::RK4, MacroScheme::ImplicitMidpoint})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown macro scheme '" + std::string(name) + "'");
}

ButcherTableau ButcherTableau::rk2() {
  ButcherTableau t;
  t.id = MacroScheme::RK2;
  t.a = RMatrix::Zero(2, 2);
  t.a(1, 0) = 0.5;
  t.b = RVector{{0.0, 1.0}};
  t.c = RVector{{0.0, 0.5}};
  return t;
}

ButcherTableau ButcherTableau::rk4() {
  ButcherTableau t;
  t.id = MacroScheme::RK4;
  t.a = RMatrix::Zero(4, 4);
  t.a(1, 0) = 0.5;
  t.a(2, 1) = 0.5;
  t.a(3, 2) = 1.0;
  t.b = RVector{{1.0 / 6.0, 2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0}};
  t.c = RVector{{0.0, 0.5, 0.5, 1.0}};
  return t;
}

ButcherTableau ButcherTableau::implicit_midpoint() {
  ButcherTableau t;
  t.id = MacroScheme::ImplicitMidpoint;
  t.a = RMatrix::Constant(1, 1, 0.5);
  t.b = RVector::Ones(1);
  t.c = RVector::Constant(1, 0.5);
  t.is_explicit = false;
  t.is_symmetric = true;
  return t;
}

ButcherTableau ButcherTableau::for_scheme(MacroScheme s) {
  switch (s) {
    case MacroScheme::RK2: return rk2();
    case MacroScheme::RK4: return rk4();
    case MacroScheme::ImplicitMidpoint: return implicit_midpoint();
  }
  throw ConfigError("unknown macro scheme");
}

SamConfig SamConfig::make(ProblemSpec p, int micro_order, long micro_n, int delta, MacroScheme macro,
                          long macro_steps, double final_time, SplitOrdering ordering) {
  const double horizon = final_time > 0.0 ? final_time : p.final_time();
  const double period = p.period();
  SamConfig cfg{std::move(p),
                SplittingScheme::for_period(micro_order, period, micro_n, 1, ordering),
                StencilSpec::central(delta),
                ButcherTableau::for_scheme(macro),
                horizon,
                macro_steps};
  cfg.validate();
  return cfg;
}

void SamConfig::validate() const {
  problem.validate();
  micro.steps_per_period(problem.period());
  if (macro_steps < 1) throw ConfigError("need at least one macro step");
  if (!(final_time > 0.0)) throw ConfigError("SAM horizon must be positive");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!tableau.is_explicit && (!(fixed_point_tol > 0.0) || max_iters < 1))
    throw ConfigError("midpoint needs a positive tolerance and iteration budget");
}

AveragedField::AveragedField(const SamConfig& cfg)
    : propagator_(cfg.problem, cfg.micro.order, cfg.micro.ordering),
      stencil_(cfg.stencil),
      n_(cfg.micro_steps_per_period()),
      scale_(1.0 / (cfg.problem.period() * cfg.problem.epsilon_eff())),
      period_sign_(cfg.problem.period_sign()) {}

StateVector AveragedField::operator()(const StateVector& u, EvalCounters* counters) const {
  const int reach = stencil_.max_offset();
  const auto forward = propagator_.period_snapshots(u, reach, +1, n_);
  const auto backward = propagator_.period_snapshots(u, reach, -1, n_);
  CVector acc = CVector::Zero(u.size());
  for (std::size_t i = 0; i < stencil_.offsets.size(); ++i) {
    const int m = stencil_.offsets[i];
    const StateVector& leg = m > 0 ? forward[m - 1] : backward[-m - 1];
    double w = stencil_.weights[i].value();
    if (period_sign_ < 0 && (m % 2 != 0)) w = -w;
    acc += w * leg.coeffs();
  }
  acc *= scale_;
  if (counters) {
    counters->micro_steps += 2L * reach * n_;
    counters->field_evals += 1;
  }
  return StateVector(u.basis_ptr(), std::move(acc));
}

StateVector averaged_field(const SamConfig& cfg, const StateVector& u) { return AveragedField(cfg)(u); }

StateVector rk_explicit_step(const ButcherTableau& tableau, const VectorField& field, const StateVector& u,
                             double step) {
  if (!tableau.is_explicit) throw ConfigError("rk_explicit_step needs an explicit tableau");
  const int s = tableau.stages();
  std::vector<StateVector> k;
  k.reserve(s);
  for (int i = 0; i < s; ++i) {
    CVector stage = u.coeffs();
    for (int j = 0; j < i; ++j)
      if (tableau.a(i, j) != 0.0) stage += (step * tableau.a(i, j)) * k[j].coeffs();
    k.push_back(field(StateVector(u.basis_ptr(), std::move(stage))));
  }
  CVector next = u.coeffs();
  for (int j = 0; j < s; ++j)
    if (tableau.b[j] != 0.0) next += (step * tableau.b[j]) * k[j].coeffs();
  return StateVector(u.basis_ptr(), std::move(next));
}

MidpointStep implicit_midpoint_step(const VectorField& field, const StateVector& u, double step, double tol,
                                    int max_iters) {
  StateVector k = field(u);
  double residual = 0.0;
  for (int iter = 1; iter <= max_iters; ++iter) {
    StateVector next = field(StateVector(u.basis_ptr(), u.coeffs() + (0.5 * step) * k.coeffs()));
    const double diff = (next.coeffs() - k.coeffs()).norm();
    const double size = next.coeffs().norm();
    residual = size > 0.0 ? diff / size : diff;
    k = std::move(next);
    if (diff <= tol * size || diff == 0.0) {
      return {StateVector(u.basis_ptr(), u.coeffs() + step * k.coeffs()), iter, residual};
    }
  }
  throw StepFailure("implicit midpoint fixed-point iteration did not converge (residual " +
                        std::to_string(residual) + ")",
                    residual, max_iters);
}

StateVector macro_step_explicit(const SamConfig& cfg, const StateVector& u) {
  const AveragedField field(cfg);
  return rk_explicit_step(cfg.tableau, [&](const StateVector& v) { return field(v); }, u,
                          cfg.problem.epsilon_eff() * cfg.macro_step());
}

StateVector macro_step_midpoint(const SamConfig& cfg, const StateVector& u) {
  if (cfg.tableau.id != MacroScheme::ImplicitMidpoint) throw ConfigError("macro_step_midpoint needs the midpoint tableau");
  const AveragedField field(cfg);
  return implicit_midpoint_step([&](const StateVector& v) { return field(v); }, u,
                                cfg.problem.epsilon_eff() * cfg.macro_step(), cfg.fixed_point_tol, cfg.max_iters)
      .state;
}

namespace {

bool is_stroboscopic(double t, double period) {
  const double turns = t / period;
  return std::abs(turns - std::round(turns)) <= 1e-9 * std::max(1.0, turns);
}

}  // namespace

SamReport sam_integrate(const SamConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const AveragedField field(cfg);
  const double H = cfg.macro_step();
  const double step = cfg.problem.epsilon_eff() * H;
  const double period = cfg.problem.period();

  SamReport report;
  EvalCounters counters;
  const VectorField f = [&](const StateVector& v) { return field(v, &counters); };

  StateVector u = cfg.problem.initial_state();
  report.times.push_back(0.0);
  report.states.push_back(u);
  report.stroboscopic.push_back(true);
  for (long N = 1; N <= cfg.macro_steps; ++N) {
    try {
      if (cfg.tableau.is_explicit) {
        u = rk_explicit_step(cfg.tableau, f, u, step);
      } else {
        u = implicit_midpoint_step(f, u, step, cfg.fixed_point_tol, cfg.max_iters).state;
      }
    } catch (const StepFailure& e) {
      report.ok = false;
      report.error = "macro step " + std::to_string(N) + ": " + e.what();
      break;
    }
    if (!u.all_finite()) {
      report.ok = false;
      report.error = "macro step " + std::to_string(N) + ": non-finite state";
      break;
    }
    report.macro_steps_done = N;
    if (N % cfg.record_every == 0 || N == cfg.macro_steps) {
      const double t = double(N) * H;
      report.times.push_back(t);
      report.states.push_back(u);
      report.stroboscopic.push_back(is_stroboscopic(t, period));
    }
  }
  report.micro_steps = counters.micro_steps;
  report.field_evals = counters.field_evals;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

StateVector post_process(const SamConfig& cfg, const StateVector& u_N, double t_N) {
  cfg.validate();
  u_N.require_basis(cfg.problem.basis());
  const double period = cfg.problem.period();
  const double k = std::floor(t_N / period + 1e-12);
  double dt = t_N - k * period;
  if (std::abs(dt) <= 1e-12 * std::max(1.0, std::abs(t_N))) dt = 0.0;
  const double sign = (cfg.problem.period_sign() < 0 && std::fmod(k, 2.0) != 0.0) ? -1.0 : 1.0;
  if (dt == 0.0) return sign == 1.0 ? u_N : Complex(sign) * u_N;

  // Averaged flow backwards from t_N to kP, in as many substeps as needed to
  // keep each no longer than the macro step.
  const AveragedField field(cfg);
  const VectorField f = [&](const StateVector& v) { return field(v); };
  const long substeps = std::max(1L, long(std::ceil(dt / cfg.macro_step() - 1e-12)));
  const double step = -cfg.problem.epsilon_eff() * dt / double(substeps);
  StateVector u = u_N;
  for (long i = 0; i < substeps; ++i) {
    u = cfg.tableau.is_explicit
            ? rk_explicit_step(cfg.tableau, f, u, step)
            : implicit_midpoint_step(f, u, step, cfg.fixed_point_tol, cfg.max_iters).state;
  }

  // Original oscillatory equation forward over dt.
  const double h = std::abs(cfg.micro.h);
  const long micro = std::max(1L, long(std::ceil(dt / h - 1e-12)));
  const SplittingPropagator prop(cfg.problem, cfg.micro.order, cfg.micro.ordering);
  StateVector psi = prop.advance(u, micro, dt / double(micro));
  if (sign != 1.0) psi *= sign;
  return psi;
}

}  // namespace strobo
