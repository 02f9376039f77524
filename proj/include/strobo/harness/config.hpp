#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strobo/problem.hpp"
#include "strobo/sam.hpp"

namespace strobo::harness {

enum class Experiment { AccuracySweep, SplittingTable, Efficiency, InvariantsLongTime, ModeEvolution };

/// CLI subcommand names: accuracy, table, efficiency, invariants, modes.
std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// How the reference solution of a sweep is obtained.
///   auto:      splitting for large eps, SAM with the 8th-order stencil below
///              the per-model threshold
///   splitting: always full-interval splitting with splitting_n steps per period
///   sam8:      always SAM, delta 8
///   refine:    per run, splitting at refine_factor times the run's n (tables)
struct ReferencePolicy {
  std::string kind = "auto";
  long splitting_n = 0;       // 0: model default
  long sam_macro_steps = 0;   // 0: model default
  long sam_micro_n = 0;       // 0: model default
  long refine_factor = 16;
  bool published_scale = false;   // model defaults at the published scale instead of desk values
  bool use_cache = true;
  std::string cache_dir;      // empty: STROBO_CACHE_DIR or the temp directory
};

struct ExperimentConfig {
  Experiment experiment = Experiment::AccuracySweep;
  Model model = Model::TorusNLS1D;
  std::vector<double> eps;
  int size_x = 0;  // grid points (Fourier) or max degree (Hermite); 0 = model default
  int size_y = 0;

  // Micro-integrator and SAM options.
  int micro_order = 4;
  SplitOrdering ordering = SplitOrdering::PotentialFirst;
  int stencil = 4;
  std::vector<MacroScheme> schemes{MacroScheme::RK4};

  // Horizon T0 / eps_eff^horizon_power, or final_time when positive.
  int horizon_power = 1;
  double final_time = 0.0;

  // Accuracy sweep: eps_eff H = T0 / macro_steps and h = P / micro_n.
  std::vector<long> macro_steps;
  std::vector<long> micro_n;
  long fixed_macro_steps = 0;
  long fixed_micro_n = 0;

  // Table and efficiency: steps per period of the stand-alone splitting runs.
  std::vector<long> splitting_n;

  // Efficiency envelope: eps_eff H_j = T0 / 2^j, h_k = P / (base_n 2^k).
  std::vector<int> envelope_j;
  std::vector<int> envelope_k;
  long envelope_base_n = 8;

  // Invariants: record every macro step that lands on a whole period.
  bool cfl_guard = true;

  // Modes.
  std::vector<std::pair<int, int>> modes;
  double sample_interval = 0.0;  // time between samples; 0 = one period
  int fam_quad = 64;
  double fam_step = 0.0;         // 0 = one period
  long modes_splitting_n = 0;    // 0 = fixed_micro_n

  ReferencePolicy reference;
  unsigned long seed = 0;

  /// Desk-scale defaults; published_scale switches to the published grids.
  static ExperimentConfig defaults(Experiment e, bool published_scale = false);
  /// Defaults overridden by the keys present in a JSON document.
  static ExperimentConfig from_json_text(std::string_view text, Experiment expected, bool published_scale = false);
  static ExperimentConfig from_file(const std::string& path, Experiment expected, bool published_scale = false);

  std::string to_json_text() const;

  /// Problem for one eps value with the configured grid sizes.
  ProblemSpec problem(double epsilon) const;
  /// T0 / eps_eff^horizon_power (or final_time).
  double horizon(const ProblemSpec& p) const;

  /// Checks step divisibility and the per-experiment required fields.
  void validate() const;
};

}  // namespace strobo::harness
