#include "strobo/harness/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>

#include <json.hpp>

#include "strobo/fam.hpp"
#include "strobo/harness/analysis.hpp"
#include "strobo/harness/csv.hpp"
#include "strobo/observables.hpp"

namespace strobo::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs f(0..n-1) on up to `threads` workers. f must not throw.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
  };
  const std::size_t t = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < t; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

bool same_eps(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

int clamp_record(long every) { return int(std::min<long>(std::max(every, 1L), std::numeric_limits<int>::max())); }

// Whole number of `step` in `span`; throws ConfigError otherwise.
long whole(double span, double step, const char* what) { return exact_step_count(span, step, what); }

std::vector<ReferenceSolution> references_for(const ExperimentConfig& cfg, const RunOptions& opt,
                                              RunReport& report) {
  std::vector<std::optional<ReferenceSolution>> refs(cfg.eps.size());
  std::vector<std::string> errors(cfg.eps.size());
  parallel_for(cfg.eps.size(), opt.threads, [&](std::size_t i) {
    try {
      const ProblemSpec p = cfg.problem(cfg.eps[i]);
      refs[i] = reference_solution(p, cfg.reference, cfg.horizon(p), cfg.ordering);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  std::vector<ReferenceSolution> out;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!refs[i]) throw std::runtime_error("reference for eps=" + format_double(cfg.eps[i]) + " failed: " + errors[i]);
    report.references.push_back({cfg.eps[i], refs[i]->plan.describe(), refs[i]->from_cache, refs[i]->wall_time_s});
    out.push_back(std::move(*refs[i]));
  }
  return out;
}

// SAM over [0, T] compared with a reference state at T.
void run_sam(const ExperimentConfig& cfg, const ProblemSpec& p, double T, MacroScheme scheme, const StateVector& ref,
             RunRecord& r) {
  const auto start = Clock::now();
  r.method = "SAM";
  r.scheme = std::string(to_string(scheme));
  r.stencil = cfg.stencil;
  r.H = T / double(r.macro_steps);
  r.h = p.period() / double(r.micro_n);
  try {
    SamConfig sc = SamConfig::make(p, cfg.micro_order, r.micro_n, cfg.stencil, scheme, r.macro_steps, T, cfg.ordering);
    sc.record_every = clamp_record(r.macro_steps);
    const SamReport rep = sam_integrate(sc);
    r.n_step = rep.micro_steps;
    if (!rep.ok) throw std::runtime_error(rep.error);
    r.error = l2_norm(sam_to_physical(sc, rep.final_state(), T) - ref);
    if (!std::isfinite(r.error)) throw std::runtime_error("non-finite error");
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = kNaN;
    r.message = e.what();
  }
  r.wall_time_s = seconds_since(start);
}

void run_split(const ExperimentConfig& cfg, const ProblemSpec& p, double T, const StateVector* ref, RunRecord& r) {
  const auto start = Clock::now();
  r.method = splitting_label(p.model(), cfg.micro_order);
  r.h = p.period() / double(r.micro_n);
  try {
    const auto scheme = SplittingScheme::for_period(cfg.micro_order, p.period(), r.micro_n, 1, cfg.ordering);
    const SplittingRun run = integrate_splitting(p, scheme, T);
    r.n_step = run.steps;
    StateVector fine = p.initial_state();
    if (ref) {
      fine = *ref;
    } else {
      const auto refined = SplittingScheme::for_period(cfg.micro_order, p.period(),
                                                       r.micro_n * cfg.reference.refine_factor, 1, cfg.ordering);
      fine = integrate_splitting(p, refined, T).final_state;
    }
    r.error = l2_norm(run.final_state - fine);
    if (!std::isfinite(r.error)) throw std::runtime_error("non-finite error");
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = kNaN;
    r.message = e.what();
  }
  r.wall_time_s = seconds_since(start);
}

}  // namespace

bool RunReport::all_ok() const {
  for (const auto& r : runs)
    if (!r.ok) return false;
  for (const auto& t : invariants)
    if (!t.ok) return false;
  for (const auto& m : modes)
    if (!m.ok) return false;
  return true;
}

std::vector<const RunRecord*> RunReport::select(double eps, const std::string& sweep, const std::string& method) const {
  std::vector<const RunRecord*> out;
  for (const auto& r : runs)
    if (same_eps(r.eps, eps) && r.sweep == sweep && (method.empty() || r.method == method)) out.push_back(&r);
  return out;
}

std::string splitting_label(Model m, int order) {
  const bool hermite = m == Model::GrossPitaevskii1D || m == Model::AnisoGP2D;
  return std::string(hermite ? "TSHP" : "TSFP") + std::to_string(order);
}

void check_steps(const ExperimentConfig& cfg) {
  cfg.validate();
  for (double eps : cfg.eps) {
    const ProblemSpec p = cfg.problem(eps);
    const double T = cfg.horizon(p);
    const double P = p.period();
    auto micro = [&](long n) { SplittingScheme::for_period(cfg.micro_order, P, n).steps_per_period(P); };
    auto macro = [&](long N) {
      if (N < 1) throw ConfigError("macro step count must be positive");
    };
    switch (cfg.experiment) {
      case Experiment::AccuracySweep:
        for (long N : cfg.macro_steps) macro(N);
        for (long n : cfg.micro_n) micro(n);
        if (!cfg.macro_steps.empty()) micro(cfg.fixed_micro_n);
        if (!cfg.micro_n.empty()) macro(cfg.fixed_macro_steps);
        break;
      case Experiment::SplittingTable:
        for (long n : cfg.splitting_n) whole(T, P / double(n), "table horizon");
        break;
      case Experiment::Efficiency:
        for (long n : cfg.splitting_n) whole(T, P / double(n), "efficiency horizon");
        for (int k : cfg.envelope_k) micro(cfg.envelope_base_n << k);
        break;
      case Experiment::InvariantsLongTime: {
        micro(cfg.fixed_micro_n);
        macro(cfg.fixed_macro_steps);
        const double h = P / double(cfg.fixed_micro_n);
        const double half = 0.5 * p.basis().modes_x();
        if (cfg.cfl_guard && !(h * half * half < kTwoPi))
          throw ConfigError("CFL guard violated: h (N_x/2)^2 = " + format_double(h * half * half) +
                            " must be below 2 pi");
        break;
      }
      case Experiment::ModeEvolution: {
        micro(cfg.fixed_micro_n);
        macro(cfg.fixed_macro_steps);
        const long split_n = cfg.modes_splitting_n > 0 ? cfg.modes_splitting_n : cfg.fixed_micro_n;
        micro(split_n);
        const double sample = cfg.sample_interval > 0.0 ? cfg.sample_interval : P;
        const double fam_step = cfg.fam_step > 0.0 ? cfg.fam_step : P;
        whole(T, sample, "modes horizon / sample interval");
        whole(sample, P / double(split_n), "sample interval / splitting step");
        whole(sample, T / double(cfg.fixed_macro_steps), "sample interval / SAM macro step");
        whole(sample, fam_step, "sample interval / FAM step");
        for (auto [kx, ky] : cfg.modes) p.basis().find_mode(kx, ky);
        break;
      }
    }
  }
}

RunReport run_accuracy_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.experiment != Experiment::AccuracySweep) throw ConfigError("not an accuracy config");
  check_steps(cfg);
  const auto start = Clock::now();
  RunReport report;
  report.config = cfg;
  const auto refs = references_for(cfg, opt, report);

  struct Job {
    std::size_t eps_index;
    RunRecord rec;
    MacroScheme scheme;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.eps.size(); ++i)
    for (MacroScheme s : cfg.schemes) {
      for (long N : cfg.macro_steps) {
        Job j{i, {}, s};
        j.rec.eps = cfg.eps[i];
        j.rec.sweep = "H";
        j.rec.macro_steps = N;
        j.rec.micro_n = cfg.fixed_micro_n;
        jobs.push_back(j);
      }
      for (long n : cfg.micro_n) {
        Job j{i, {}, s};
        j.rec.eps = cfg.eps[i];
        j.rec.sweep = "h";
        j.rec.macro_steps = cfg.fixed_macro_steps;
        j.rec.micro_n = n;
        jobs.push_back(j);
      }
    }
  parallel_for(jobs.size(), opt.threads, [&](std::size_t q) {
    Job& j = jobs[q];
    const ProblemSpec p = cfg.problem(cfg.eps[j.eps_index]);
    run_sam(cfg, p, cfg.horizon(p), j.scheme, refs[j.eps_index].state, j.rec);
  });
  for (auto& j : jobs) report.runs.push_back(std::move(j.rec));
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run_splitting_table(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.experiment != Experiment::SplittingTable) throw ConfigError("not a table config");
  check_steps(cfg);
  const auto start = Clock::now();
  RunReport report;
  report.config = cfg;
  std::vector<ReferenceSolution> refs;
  if (cfg.reference.kind != "refine") refs = references_for(cfg, opt, report);

  std::vector<std::pair<std::size_t, RunRecord>> jobs;
  for (std::size_t i = 0; i < cfg.eps.size(); ++i)
    for (long n : cfg.splitting_n) {
      RunRecord r;
      r.eps = cfg.eps[i];
      r.sweep = "splitting";
      r.micro_n = n;
      jobs.emplace_back(i, r);
    }
  parallel_for(jobs.size(), opt.threads, [&](std::size_t q) {
    auto& [i, r] = jobs[q];
    const ProblemSpec p = cfg.problem(cfg.eps[i]);
    run_split(cfg, p, cfg.horizon(p), refs.empty() ? nullptr : &refs[i].state, r);
  });
  for (auto& j : jobs) report.runs.push_back(std::move(j.second));
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run_efficiency(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.experiment != Experiment::Efficiency) throw ConfigError("not an efficiency config");
  check_steps(cfg);
  const auto start = Clock::now();
  RunReport report;
  report.config = cfg;
  const auto refs = references_for(cfg, opt, report);

  std::vector<std::pair<std::size_t, RunRecord>> jobs;
  for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
    for (int j : cfg.envelope_j)
      for (int k : cfg.envelope_k) {
        RunRecord r;
        r.eps = cfg.eps[i];
        r.sweep = "sam";
        r.j = j;
        r.k = k;
        r.macro_steps = 1L << j;
        r.micro_n = cfg.envelope_base_n << k;
        jobs.emplace_back(i, r);
      }
    for (long n : cfg.splitting_n) {
      RunRecord r;
      r.eps = cfg.eps[i];
      r.sweep = "splitting";
      r.micro_n = n;
      jobs.emplace_back(i, r);
    }
  }
  // Expensive runs first so the pool drains evenly.
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t q = 0; q < order.size(); ++q) order[q] = q;
  auto cost = [&](const RunRecord& r) {
    return r.sweep == "sam" ? double(r.macro_steps) * double(r.micro_n) * 16.0 : double(r.micro_n) / cfg.eps.front();
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cost(jobs[a].second) > cost(jobs[b].second); });
  parallel_for(jobs.size(), opt.threads, [&](std::size_t q) {
    auto& [i, r] = jobs[order[q]];
    const ProblemSpec p = cfg.problem(cfg.eps[i]);
    if (r.sweep == "sam")
      run_sam(cfg, p, cfg.horizon(p), MacroScheme::RK4, refs[i].state, r);
    else
      run_split(cfg, p, cfg.horizon(p), &refs[i].state, r);
  });
  for (auto& j : jobs) report.runs.push_back(std::move(j.second));
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run_invariants_longtime(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.experiment != Experiment::InvariantsLongTime) throw ConfigError("not an invariants config");
  check_steps(cfg);
  const auto start = Clock::now();
  RunReport report;
  report.config = cfg;

  std::vector<std::pair<MacroScheme, InvariantTrace>> jobs;
  for (double eps : cfg.eps)
    for (MacroScheme s : cfg.schemes) {
      InvariantTrace t;
      t.eps = eps;
      t.macro = std::string(to_string(s));
      jobs.emplace_back(s, t);
    }
  parallel_for(jobs.size(), opt.threads, [&](std::size_t q) {
    auto& [scheme, trace] = jobs[q];
    const auto t0 = Clock::now();
    try {
      const ProblemSpec p = cfg.problem(trace.eps);
      SamConfig sc = SamConfig::make(p, cfg.micro_order, cfg.fixed_micro_n, cfg.stencil, scheme,
                                     cfg.fixed_macro_steps, cfg.horizon(p), cfg.ordering);
      sc.record_every = 1;
      const SamReport rep = sam_integrate(sc);
      const SpectralBasis& b = p.basis();
      const double m0 = mass(b, p.initial_state());
      const double e0 = energy_torus(b, p.initial_state(), p.epsilon());
      for (std::size_t i = 0; i < rep.times.size(); ++i) {
        if (!rep.stroboscopic[i]) continue;
        trace.t.push_back(rep.times[i]);
        trace.mass_err.push_back(std::abs(mass(b, rep.states[i]) - m0));
        trace.energy_err.push_back(std::abs(energy_torus(b, rep.states[i], p.epsilon()) - e0));
      }
      if (!rep.ok) throw std::runtime_error(rep.error);
    } catch (const std::exception& e) {
      trace.ok = false;
      trace.message = e.what();
    }
    trace.wall_time_s = seconds_since(t0);
  });
  for (auto& j : jobs) report.invariants.push_back(std::move(j.second));
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run_mode_evolution(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.experiment != Experiment::ModeEvolution) throw ConfigError("not a modes config");
  check_steps(cfg);
  const auto start = Clock::now();
  RunReport report;
  report.config = cfg;

  enum class Method { Splitting, Sam, Fam };
  std::vector<std::pair<Method, ModeTrace>> jobs;
  for (double eps : cfg.eps)
    for (Method m : {Method::Splitting, Method::Sam, Method::Fam}) {
      ModeTrace t;
      t.eps = eps;
      t.method = m == Method::Splitting ? splitting_label(cfg.model, cfg.micro_order) : m == Method::Sam ? "SAM" : "FAM";
      jobs.emplace_back(m, t);
    }
  parallel_for(jobs.size(), opt.threads, [&](std::size_t q) {
    auto& [method, trace] = jobs[q];
    const auto t0 = Clock::now();
    try {
      const ProblemSpec p = cfg.problem(trace.eps);
      const double T = cfg.horizon(p);
      const double P = p.period();
      const double sample = cfg.sample_interval > 0.0 ? cfg.sample_interval : P;
      std::vector<double> times;
      std::vector<StateVector> states;
      if (method == Method::Splitting) {
        const long n = cfg.modes_splitting_n > 0 ? cfg.modes_splitting_n : cfg.fixed_micro_n;
        SplittingRun run =
            integrate_splitting(p, SplittingScheme::for_period(cfg.micro_order, P, n, 1, cfg.ordering), T, sample);
        times = std::move(run.sample_times);
        states = std::move(run.samples);
      } else if (method == Method::Sam) {
        SamConfig sc = SamConfig::make(p, cfg.micro_order, cfg.fixed_micro_n, cfg.stencil, MacroScheme::RK4,
                                       cfg.fixed_macro_steps, T, cfg.ordering);
        sc.record_every = clamp_record(whole(sample, sc.macro_step(), "SAM sampling"));
        SamReport rep = sam_integrate(sc);
        if (!rep.ok) throw std::runtime_error(rep.error);
        times = std::move(rep.times);
        states = std::move(rep.states);
      } else {
        const double step = cfg.fam_step > 0.0 ? cfg.fam_step : P;
        FamConfig fc = FamConfig::make(p, step, cfg.fam_quad, T);
        fc.record_every = clamp_record(whole(sample, step, "FAM sampling"));
        FamReport rep = fam_integrate(fc);
        times = std::move(rep.times);
        states = std::move(rep.states);
      }
      // An unstable explicit run is cut at its first non-finite state.
      std::size_t good = 0;
      while (good < states.size() && states[good].all_finite()) ++good;
      for (std::size_t i = 0; i < good; ++i) {
        trace.t.push_back(times[i]);
        trace.magnitudes.push_back(mode_magnitudes(states[i], cfg.modes));
      }
      if (good < states.size()) {
        trace.ok = false;
        trace.message = trace.method + " state became non-finite by t = " + format_double(times[good]);
      }
    } catch (const std::exception& e) {
      trace.ok = false;
      trace.message = e.what();
    }
    trace.wall_time_s = seconds_since(t0);
  });
  for (auto& j : jobs) report.modes.push_back(std::move(j.second));
  report.wall_time_s = seconds_since(start);
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  switch (cfg.experiment) {
    case Experiment::AccuracySweep: return run_accuracy_sweep(cfg, opt);
    case Experiment::SplittingTable: return run_splitting_table(cfg, opt);
    case Experiment::Efficiency: return run_efficiency(cfg, opt);
    case Experiment::InvariantsLongTime: return run_invariants_longtime(cfg, opt);
    case Experiment::ModeEvolution: return run_mode_evolution(cfg, opt);
  }
  throw ConfigError("unknown experiment");
}

std::string write_outputs(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  const ExperimentConfig& cfg = report.config;
  fs::create_directories(dir);
  const std::string name(to_string(cfg.experiment));
  const std::string csv_path = (fs::path(dir) / (name + ".csv")).string();
  const std::string model(to_string(cfg.model));
  const auto f = format_double;

  switch (cfg.experiment) {
    case Experiment::AccuracySweep: {
      CsvWriter w(csv_path, schema::accuracy);
      for (const auto& r : report.runs)
        w.row({model, f(r.eps), f(r.H), f(r.h), r.scheme, std::to_string(r.stencil), f(r.error)});
      w.close();
      break;
    }
    case Experiment::SplittingTable: {
      CsvWriter w(csv_path, schema::table);
      for (const auto& r : report.runs) w.row({model, f(r.eps), f(r.h), f(r.error)});
      w.close();
      break;
    }
    case Experiment::Efficiency: {
      CsvWriter w(csv_path, schema::efficiency);
      for (double eps : cfg.eps) {
        std::vector<CurvePoint> pts;
        for (const RunRecord* r : report.select(eps, "sam")) {
          w.row({model, f(eps), "SAM_run", std::to_string(r->n_step), f(r->error)});
          pts.push_back({double(r->n_step), r->error});
        }
        for (const auto& pt : lower_envelope(pts))
          w.row({model, f(eps), "SAM", std::to_string(long(pt.x)), f(pt.y)});
        for (const RunRecord* r : report.select(eps, "splitting"))
          w.row({model, f(eps), r->method, std::to_string(r->n_step), f(r->error)});
      }
      w.close();
      break;
    }
    case Experiment::InvariantsLongTime: {
      CsvWriter w(csv_path, schema::invariants);
      for (const auto& t : report.invariants)
        for (std::size_t i = 0; i < t.t.size(); ++i)
          w.row({model, f(t.eps), t.macro, f(t.t[i]), f(t.mass_err[i]), f(t.energy_err[i])});
      w.close();
      break;
    }
    case Experiment::ModeEvolution: {
      CsvWriter w(csv_path, schema::modes);
      for (const auto& t : report.modes)
        for (std::size_t i = 0; i < t.t.size(); ++i)
          for (std::size_t m = 0; m < cfg.modes.size(); ++m)
            w.row({model, f(t.eps), t.method, f(t.t[i]), std::to_string(cfg.modes[m].first),
                   std::to_string(cfg.modes[m].second), f(t.magnitudes[i][m])});
      w.close();
      break;
    }
  }

  nlohmann::json meta;
  meta["experiment"] = name;
  meta["config"] = nlohmann::json::parse(cfg.to_json_text());
  meta["wall_time_s"] = report.wall_time_s;
  meta["ok"] = report.all_ok();
  auto& refs = meta["references"] = nlohmann::json::array();
  for (const auto& r : report.references)
    refs.push_back({{"eps", r.eps}, {"plan", r.plan}, {"from_cache", r.from_cache}, {"wall_time_s", r.wall_time_s}});
  auto& runs = meta["runs"] = nlohmann::json::array();
  for (const auto& r : report.runs)
    runs.push_back({{"eps", r.eps},         {"sweep", r.sweep},     {"method", r.method},
                    {"scheme", r.scheme},   {"macro_steps", r.macro_steps}, {"micro_n", r.micro_n},
                    {"N_step", r.n_step},   {"wall_time_s", r.wall_time_s}, {"ok", r.ok},
                    {"message", r.message}});
  for (const auto& t : report.invariants)
    runs.push_back({{"eps", t.eps}, {"macro", t.macro}, {"wall_time_s", t.wall_time_s}, {"ok", t.ok},
                    {"message", t.message}});
  for (const auto& t : report.modes)
    runs.push_back({{"eps", t.eps}, {"method", t.method}, {"wall_time_s", t.wall_time_s}, {"ok", t.ok},
                    {"message", t.message}});
  std::ofstream(fs::path(dir) / (name + "_meta.json")) << meta.dump(2) << '\n';
  return csv_path;
}

}  // namespace strobo::harness
