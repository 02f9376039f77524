// strobo: run the accuracy, table, efficiency, invariants and modes experiments.
//
//   strobo <experiment> [--config file.json] [--out dir] [--threads n] [--published-scale]
//
// Exit status: 0 success, 1 some run failed, 2 bad configuration.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "strobo/harness/csv.hpp"
#include "strobo/harness/experiments.hpp"

using namespace strobo;
using namespace strobo::harness;

namespace {

struct Options {
  std::string config;
  std::string out = "results";
  int threads = 1;
  bool published_scale = false;
  bool dump_config = false;
};

int run(Experiment e, const Options& o) {
  ExperimentConfig cfg;
  try {
    cfg = o.config.empty() ? ExperimentConfig::defaults(e, o.published_scale)
                           : ExperimentConfig::from_file(o.config, e, o.published_scale);
    check_steps(cfg);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  }
  if (o.dump_config) {
    std::cout << cfg.to_json_text() << '\n';
    return 0;
  }
  try {
    const RunReport report = run_experiment(cfg, RunOptions{o.threads});
    const std::string csv = write_outputs(report, o.out);
    std::cerr << to_string(e) << ": wrote " << csv << " in " << format_double(report.wall_time_s) << " s\n";
    for (const auto& r : report.runs)
      if (!r.ok) std::cerr << "  failed run eps=" << format_double(r.eps) << ": " << r.message << '\n';
    for (const auto& t : report.invariants)
      if (!t.ok) std::cerr << "  failed " << t.macro << " eps=" << format_double(t.eps) << ": " << t.message << '\n';
    for (const auto& t : report.modes)
      if (!t.ok) std::cerr << "  failed " << t.method << " eps=" << format_double(t.eps) << ": " << t.message << '\n';
    return report.all_ok() ? 0 : 1;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "run failed: " << err.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stroboscopic averaging experiments for oscillatory NLS / Gross-Pitaevskii equations"};
  app.require_subcommand(1);
  Options o;
  const std::pair<Experiment, const char*> experiments[] = {
      {Experiment::AccuracySweep, "SAM error versus macro and micro step"},
      {Experiment::SplittingTable, "splitting error table over (eps, h)"},
      {Experiment::Efficiency, "error versus number of micro steps, SAM and splitting"},
      {Experiment::InvariantsLongTime, "mass and energy errors over T0/eps^2"},
      {Experiment::ModeEvolution, "mode magnitudes by splitting, SAM and FAM"},
  };
  std::vector<std::pair<CLI::App*, Experiment>> subs;
  for (auto [e, help] : experiments) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(e)), help);
    sub->add_option("--config", o.config, "JSON experiment config (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--published-scale", o.published_scale, "use the published grids instead of desk-scale defaults");
    sub->add_flag("--print-config", o.dump_config, "print the effective config and exit");
    subs.emplace_back(sub, e);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }
  for (auto [sub, e] : subs)
    if (sub->parsed()) return run(e, o);
  return 2;
}
