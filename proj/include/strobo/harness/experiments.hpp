#pragma once

#include <string>
#include <vector>

#include "strobo/harness/config.hpp"
#include "strobo/harness/reference.hpp"

namespace strobo::harness {

/// One scalar-error run of a sweep.
struct RunRecord {
  double eps = 0.0;
  std::string sweep;   // accuracy: "H" or "h"; efficiency: "sam" or "splitting"; table: "splitting"
  std::string method;  // SAM, TSFP4, TSHP4, ...
  std::string scheme;  // macro scheme for SAM runs
  int stencil = 0;
  long macro_steps = 0;
  long micro_n = 0;
  int j = -1, k = -1;  // efficiency grid indices
  double H = 0.0;
  double h = 0.0;
  long n_step = 0;     // micro steps actually executed
  double error = 0.0;
  double wall_time_s = 0.0;
  bool ok = true;
  std::string message;
};

/// Invariant errors at stroboscopic times for one macro scheme.
struct InvariantTrace {
  double eps = 0.0;
  std::string macro;
  std::vector<double> t, mass_err, energy_err;
  double wall_time_s = 0.0;
  bool ok = true;
  std::string message;
};

/// Mode magnitudes over shared sample times for one method.
struct ModeTrace {
  double eps = 0.0;
  std::string method;  // TSFP4/TSHP4, SAM, FAM
  std::vector<double> t;
  std::vector<std::vector<double>> magnitudes;  // [sample][mode]
  double wall_time_s = 0.0;
  bool ok = true;
  std::string message;
};

struct ReferenceInfo {
  double eps = 0.0;
  std::string plan;
  bool from_cache = false;
  double wall_time_s = 0.0;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  std::vector<InvariantTrace> invariants;
  std::vector<ModeTrace> modes;
  std::vector<ReferenceInfo> references;
  double wall_time_s = 0.0;

  bool all_ok() const;
  /// Error-run records matching eps (within rounding), sweep and method ("" = any).
  std::vector<const RunRecord*> select(double eps, const std::string& sweep, const std::string& method = "") const;
};

struct RunOptions {
  int threads = 1;
};

/// Splitting solver label: TSFP2/TSFP4 on Fourier bases, TSHP2/TSHP4 on Hermite bases.
std::string splitting_label(Model m, int order);

/// Validates step divisibility for every run a config implies; throws ConfigError.
void check_steps(const ExperimentConfig& cfg);

RunReport run_accuracy_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});
RunReport run_splitting_table(const ExperimentConfig& cfg, const RunOptions& opt = {});
RunReport run_efficiency(const ExperimentConfig& cfg, const RunOptions& opt = {});
RunReport run_invariants_longtime(const ExperimentConfig& cfg, const RunOptions& opt = {});
RunReport run_mode_evolution(const ExperimentConfig& cfg, const RunOptions& opt = {});
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// <dir>/<experiment>.csv with the documented header and <dir>/<experiment>_meta.json
/// with timings, references and failures. Returns the CSV path.
std::string write_outputs(const RunReport& report, const std::string& dir);

}  // namespace strobo::harness
