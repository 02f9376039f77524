#include "strobo/splitting.hpp"

#include <cmath>

namespace strobo {

double YoshidaWeights::outer() { return 1.0 / (2.0 - std::cbrt(2.0)); }
double YoshidaWeights::middle() { return 1.0 - 2.0 * outer(); }

long exact_step_count(double duration, double h, const char* what) {
  if (!(std::abs(h) > 0.0)) throw ConfigError(std::string(what) + ": step must be non-zero");
  const double ratio = std::abs(duration / h);
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(std::string(what) + ": step " + std::to_string(h) + " does not divide " + std::to_string(duration));
  return long(n);
}

std::string_view to_string(SplitOrdering o) { return o == SplitOrdering::KineticFirst ? "kpk" : "pkp"; }

SplitOrdering parse_split_ordering(std::string_view name) {
  if (name == "kpk") return SplitOrdering::KineticFirst;
  if (name == "pkp") return SplitOrdering::PotentialFirst;
  throw ConfigError("unknown splitting ordering '" + std::string(name) + "' (expected kpk or pkp)");
}

SplittingScheme SplittingScheme::for_period(int order, double period, long n, int direction, SplitOrdering ordering) {
  if (n < 1) throw ConfigError("micro step count per period must be positive");
  SplittingScheme s{order, (direction >= 0 ? 1.0 : -1.0) * period / double(n), ordering};
  s.validate();
  return s;
}

long SplittingScheme::steps_per_period(double period) const {
  validate();
  return exact_step_count(period, h, "micro step");
}

void SplittingScheme::validate() const {
  if (order != 2 && order != 4) throw ConfigError("splitting order must be 2 or 4");
  if (!(std::abs(h) > 0.0) || !std::isfinite(h)) throw ConfigError("micro step must be finite and non-zero");
}

StateVector kinetic_flow(const ProblemSpec& p, double t, const StateVector& psi) {
  psi.require_basis(p.basis());
  CVector c = psi.coeffs();
  const double eps = p.epsilon_eff();
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c[k] *= std::polar(1.0, -t * (p.eigenvalues()[k] + eps * p.slow_eigenvalues()[k]));
  return StateVector(psi.basis_ptr(), std::move(c));
}

StateVector potential_flow(const ProblemSpec& p, double t, const StateVector& psi) {
  psi.require_basis(p.basis());
  const SpectralBasis& b = p.basis();
  CVector grid = b.to_grid(psi.coeffs());
  const double scale = t * p.epsilon_eff();
  for (Eigen::Index j = 0; j < grid.size(); ++j)
    grid[j] *= std::polar(1.0, -scale * p.coupling()[j] * std::norm(grid[j]));
  return StateVector(psi.basis_ptr(), b.to_coeffs(grid));
}

StateVector strang_step(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi) {
  const double h = scheme.h;
  if (scheme.ordering == SplitOrdering::PotentialFirst)
    return potential_flow(p, 0.5 * h, kinetic_flow(p, h, potential_flow(p, 0.5 * h, psi)));
  return kinetic_flow(p, 0.5 * h, potential_flow(p, h, kinetic_flow(p, 0.5 * h, psi)));
}

StateVector yoshida4_step(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi) {
  const double w1 = YoshidaWeights::outer();
  const double w0 = YoshidaWeights::middle();
  const SplittingScheme outer{2, w1 * scheme.h, scheme.ordering};
  const SplittingScheme middle{2, w0 * scheme.h, scheme.ordering};
  return strang_step(p, outer, strang_step(p, middle, strang_step(p, outer, psi)));
}

StateVector splitting_step(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi) {
  scheme.validate();
  return scheme.order == 2 ? strang_step(p, scheme, psi) : yoshida4_step(p, scheme, psi);
}

struct SplittingPropagator::Workspace {
  explicit Workspace(const SpectralBasis& b) : coeffs(b.size()), grid(b.grid_size()) {}
  AlignedBuffer coeffs;
  AlignedBuffer grid;
};

SplittingPropagator::SplittingPropagator(ProblemSpec problem, int order, SplitOrdering ordering)
    : problem_(std::move(problem)), order_(order), ordering_(ordering) {
  if (order_ != 2 && order_ != 4) throw ConfigError("splitting order must be 2 or 4");
  const double eps = problem_.epsilon_eff();
  kinetic_rates_ = problem_.eigenvalues() + eps * problem_.slow_eigenvalues();
  potential_rates_ =
      (eps * problem_.coupling().array() * problem_.basis().work_density().array()).matrix();
  if (order_ == 2) {
    outer_fractions_ = {0.5, 0.5};
    inner_fractions_ = {1.0};
  } else {
    const double w1 = YoshidaWeights::outer();
    const double w0 = YoshidaWeights::middle();
    outer_fractions_ = {0.5 * w1, 0.5 * (w1 + w0), 0.5 * (w0 + w1), 0.5 * w1};
    inner_fractions_ = {w1, w0, w1};
  }
}

void SplittingPropagator::run(Workspace& ws, long steps, double tau) const {
  if (steps <= 0) return;
  const SpectralBasis& b = problem_.basis();
  const Eigen::Index nc = b.size();
  const Eigen::Index ng = b.grid_size();
  const bool kinetic_outside = ordering_ == SplitOrdering::KineticFirst;

  // Kinetic phases are tabulated once per call. Both sub-flows compose
  // exactly with themselves, so the closing outer flow of one step merges
  // with the opening one of the next.
  auto table = [&](double fraction) {
    CVector e(nc);
    for (Eigen::Index k = 0; k < nc; ++k) e[k] = std::polar(1.0, -fraction * tau * kinetic_rates_[k]);
    return e;
  };
  auto kinetic = [&](const CVector& e) {
    for (Eigen::Index k = 0; k < nc; ++k) ws.coeffs[k] *= e[k];
  };
  bool on_grid = false;
  auto potential = [&](double fraction) {
    if (!on_grid) b.synthesize(ws.coeffs, ws.grid);
    const double s = -fraction * tau;
    for (Eigen::Index j = 0; j < ng; ++j) {
      Complex& w = ws.grid[j];
      w *= std::polar(1.0, s * potential_rates_[j] * std::norm(w));
    }
    on_grid = true;
  };
  auto to_coeffs = [&] {
    if (on_grid) b.analyze(ws.grid, ws.coeffs);
    on_grid = false;
  };

  const std::size_t n_outer = outer_fractions_.size();
  const double first = outer_fractions_.front();
  const double merged = outer_fractions_.back() + outer_fractions_.front();
  const double last = outer_fractions_.back();

  if (kinetic_outside) {
    std::vector<CVector> outer;
    for (std::size_t i = 1; i + 1 < n_outer; ++i) outer.push_back(table(outer_fractions_[i]));
    const CVector e_first = table(first), e_merged = table(merged), e_last = table(last);
    kinetic(e_first);
    for (long step = 0; step < steps; ++step) {
      for (std::size_t i = 0; i < inner_fractions_.size(); ++i) {
        potential(inner_fractions_[i]);
        to_coeffs();
        if (i + 1 < inner_fractions_.size()) kinetic(outer[i]);
      }
      kinetic(step + 1 < steps ? e_merged : e_last);
    }
  } else {
    std::vector<CVector> inner;
    for (double f : inner_fractions_) inner.push_back(table(f));
    potential(first);
    for (long step = 0; step < steps; ++step) {
      for (std::size_t i = 0; i < inner.size(); ++i) {
        to_coeffs();
        kinetic(inner[i]);
        if (i + 1 < inner.size()) potential(outer_fractions_[i + 1]);
      }
      potential(step + 1 < steps ? merged : last);
    }
    to_coeffs();
  }
}

StateVector SplittingPropagator::advance(const StateVector& u, long steps, double tau) const {
  u.require_basis(problem_.basis());
  if (steps < 0) throw ConfigError("advance: negative step count");
  Workspace ws(problem_.basis());
  std::copy(u.coeffs().data(), u.coeffs().data() + u.size(), ws.coeffs.data());
  run(ws, steps, tau);
  return StateVector(u.basis_ptr(), Eigen::Map<const CVector>(ws.coeffs.data(), u.size()));
}

std::vector<StateVector> SplittingPropagator::period_snapshots(const StateVector& u, int periods, int direction,
                                                               long n) const {
  u.require_basis(problem_.basis());
  if (n < 1) throw ConfigError("period_snapshots: n must be positive");
  const double tau = (direction >= 0 ? 1.0 : -1.0) * problem_.period() / double(n);
  Workspace ws(problem_.basis());
  std::copy(u.coeffs().data(), u.coeffs().data() + u.size(), ws.coeffs.data());
  std::vector<StateVector> out;
  out.reserve(std::max(periods, 0));
  for (int m = 0; m < periods; ++m) {
    run(ws, n, tau);
    out.emplace_back(u.basis_ptr(), Eigen::Map<const CVector>(ws.coeffs.data(), u.size()));
  }
  return out;
}

StateVector propagate_periods(const ProblemSpec& p, const SplittingScheme& scheme, const StateVector& psi, int k) {
  const long n = scheme.steps_per_period(p.period());
  if (k == 0) return psi;
  SplittingPropagator prop(p, scheme.order, scheme.ordering);
  const double tau = (k > 0 ? 1.0 : -1.0) * std::abs(scheme.h);
  return prop.advance(psi, long(std::abs(k)) * n, tau);
}

SplittingRun integrate_splitting(const ProblemSpec& p, const SplittingScheme& scheme, double final_time,
                                 double sample_interval) {
  scheme.validate();
  scheme.steps_per_period(p.period());
  const double horizon = final_time > 0.0 ? final_time : p.final_time();
  const long total = exact_step_count(horizon, scheme.h, "splitting horizon");
  long per_sample = total;
  if (sample_interval > 0.0) per_sample = exact_step_count(sample_interval, scheme.h, "sample interval");
  SplittingPropagator prop(p, scheme.order, scheme.ordering);
  const double tau = std::abs(scheme.h);
  SplittingRun run;
  StateVector u = p.initial_state();
  long done = 0;
  if (sample_interval > 0.0) {
    run.sample_times.push_back(0.0);
    run.samples.push_back(u);
  }
  while (done < total) {
    const long chunk = std::min(per_sample, total - done);
    u = prop.advance(u, chunk, tau);
    done += chunk;
    if (sample_interval > 0.0 && chunk == per_sample) {
      run.sample_times.push_back(double(done) * tau);
      run.samples.push_back(u);
    }
  }
  run.final_state = std::move(u);
  run.steps = total;
  return run;
}

}  // namespace strobo
