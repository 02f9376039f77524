#include "strobo/fam.hpp"

#include <chrono>
#include <cmath>

#include "strobo/sam.hpp"
#include "strobo/splitting.hpp"

namespace strobo {

FamConfig FamConfig::make(ProblemSpec p, double step, int n_quad, double final_time) {
  FamConfig cfg{std::move(p), n_quad, step, final_time, 1};
  if (cfg.final_time <= 0.0) cfg.final_time = cfg.problem.final_time();
  cfg.validate();
  return cfg;
}

long FamConfig::step_count() const { return exact_step_count(final_time, step, "FAM horizon"); }

void FamConfig::validate() const {
  problem.validate();
  if (n_quad < 2 || n_quad % 2 != 0) throw ConfigError("n_quad must be even and >= 2");
  if (!(step > 0.0)) throw ConfigError("FAM step must be positive");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  step_count();
}

StateVector fam_field(const ProblemSpec& p, int n_quad, const StateVector& u) {
  if (n_quad < 2 || n_quad % 2 != 0) throw ConfigError("n_quad must be even and >= 2");
  const double period = p.period();
  CVector acc = CVector::Zero(u.size());
  for (int q = 0; q < n_quad; ++q) acc += filtered_rhs(p, q * period / n_quad, u).coeffs();
  acc /= double(n_quad);
  return StateVector(u.basis_ptr(), std::move(acc));
}

StateVector fam_field(const FamConfig& cfg, const StateVector& u) { return fam_field(cfg.problem, cfg.n_quad, u); }

FamReport fam_integrate(const FamConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const long steps = cfg.step_count();
  const ButcherTableau rk4 = ButcherTableau::rk4();
  FamReport report;
  const VectorField f = [&](const StateVector& v) {
    ++report.field_evals;
    return fam_field(cfg, v);
  };
  const double h = cfg.problem.epsilon_eff() * cfg.step;
  StateVector u = cfg.problem.initial_state();
  report.times.push_back(0.0);
  report.states.push_back(u);
  for (long N = 1; N <= steps; ++N) {
    u = rk_explicit_step(rk4, f, u, h);
    if (N % cfg.record_every == 0 || N == steps) {
      report.times.push_back(double(N) * cfg.step);
      report.states.push_back(u);
    }
  }
  report.steps = steps;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace strobo
