#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "strobo/harness/analysis.hpp"
#include "strobo/harness/csv.hpp"
#include "strobo/harness/experiments.hpp"
#include "test_util.hpp"

using namespace strobo;
using namespace strobo::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("strobo-unit-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// eps = 1/8: T = 2 pi, four macro steps of P/4, 16 micro steps per period
const char* kSmallAccuracy = R"({
  "eps": [0.125], "size_x": 32, "stencil": 8, "schemes": ["RK4"],
  "macro_steps": [4], "micro_n": [16], "fixed_macro_steps": 4, "fixed_micro_n": 16,
  "reference": {"kind": "sam8", "sam_macro_steps": 4, "sam_micro_n": 16, "use_cache": false}
})";

}  // namespace

TEST(Reference, BranchSelection) {
  ReferencePolicy automatic;
  EXPECT_EQ(select_reference_branch(Model::TorusNLS1D, std::ldexp(1.0, -3), automatic), ReferenceBranch::Splitting);
  EXPECT_EQ(select_reference_branch(Model::TorusNLS1D, std::ldexp(1.0, -8), automatic), ReferenceBranch::Splitting);
  EXPECT_EQ(select_reference_branch(Model::TorusNLS1D, std::ldexp(1.0, -9), automatic), ReferenceBranch::Sam8);
  EXPECT_EQ(select_reference_branch(Model::GrossPitaevskii1D, std::ldexp(1.0, -7), automatic),
            ReferenceBranch::Splitting);
  EXPECT_EQ(select_reference_branch(Model::GrossPitaevskii1D, std::ldexp(1.0, -8), automatic),
            ReferenceBranch::Sam8);
  EXPECT_EQ(select_reference_branch(Model::AnisoGP2D, 1e-4, automatic), ReferenceBranch::Splitting);
  ReferencePolicy forced;
  forced.kind = "sam8";
  EXPECT_EQ(select_reference_branch(Model::TorusNLS1D, 0.5, forced), ReferenceBranch::Sam8);
  forced.kind = "splitting";
  EXPECT_EQ(select_reference_branch(Model::TorusNLS1D, 1e-6, forced), ReferenceBranch::Splitting);
}

TEST(Reference, CacheIsDeterministicAndSelfHealing) {
  ::unsetenv("STROBO_CACHE_DIR");
  const fs::path dir = scratch_dir("cache");
  ReferencePolicy policy;
  policy.kind = "splitting";
  policy.splitting_n = 64;
  policy.cache_dir = dir.string();
  auto p = torus_nls_1d(0.125, 32);
  auto first = reference_solution(p, policy, p.final_time());
  EXPECT_FALSE(first.from_cache);
  auto second = reference_solution(p, policy, p.final_time());
  EXPECT_TRUE(second.from_cache);
  EXPECT_EQ((first.state.coeffs() - second.state.coeffs()).norm(), 0.0);

  // same key, different eps: separate entry
  auto other = reference_solution(p.with_epsilon(0.0625), policy, kTwoPi);
  EXPECT_FALSE(other.from_cache);

  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".bin") continue;
    std::fstream f(e.path(), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const char junk[8] = {1, 2, 3, 4, 5, 6, 7, 8};
    f.write(junk, 8);
  }
  auto healed = reference_solution(p, policy, p.final_time());
  EXPECT_FALSE(healed.from_cache);
  EXPECT_EQ((healed.state.coeffs() - first.state.coeffs()).norm(), 0.0);
  EXPECT_TRUE(reference_solution(p, policy, p.final_time()).from_cache);
  fs::remove_all(dir);
}

TEST(Reference, SplittingBranchMatchesDirectRun) {
  ReferencePolicy policy;
  policy.kind = "splitting";
  policy.splitting_n = 32;
  policy.use_cache = false;
  auto p = torus_nls_1d(0.25, 32);
  auto ref = reference_solution(p, policy, p.final_time(), SplitOrdering::KineticFirst);
  auto direct = integrate_splitting(p, SplittingScheme::for_period(4, kTwoPi, 32)).final_state;
  EXPECT_EQ((ref.state.coeffs() - direct.coeffs()).norm(), 0.0);
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 6.173e-2, 1e-300, -2.5, 123456789.0}) {
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(format_double(0.125), "0.125");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Csv, WriterChecksColumnCount) {
  const fs::path dir = scratch_dir("csv");
  CsvWriter w((dir / "t.csv").string(), schema::table);
  w.row({"torus_nls_1d", "0.125", "0.19634954084936207", "0.06"});
  EXPECT_THROW(w.row({"a", "b"}), std::exception);
  w.close();
  EXPECT_EQ(slurp(dir / "t.csv"), "model,eps,h,error\ntorus_nls_1d,0.125,0.19634954084936207,0.06\n");
  fs::remove_all(dir);
}

TEST(Config, ParsingAndErrors) {
  auto c = ExperimentConfig::from_json_text(R"({"eps_log2": [-3, -4], "size_x": 16})", Experiment::SplittingTable);
  EXPECT_EQ(c.eps, (std::vector<double>{0.125, 0.0625}));
  EXPECT_EQ(c.size_x, 16);
  EXPECT_THROW(ExperimentConfig::from_json_text("{", Experiment::SplittingTable), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"epsilon": [0.1]})", Experiment::SplittingTable), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"experiment": "modes"})", Experiment::SplittingTable),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"model": "sphere"})", Experiment::SplittingTable), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"eps": "small"})", Experiment::SplittingTable), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"reference": {"kinds": "x"}})", Experiment::SplittingTable),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/config.json", Experiment::SplittingTable), ConfigError);
  EXPECT_EQ(parse_experiment("invariants"), Experiment::InvariantsLongTime);
  EXPECT_THROW(parse_experiment("fig2"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  for (Experiment e : {Experiment::AccuracySweep, Experiment::SplittingTable, Experiment::Efficiency,
                       Experiment::InvariantsLongTime, Experiment::ModeEvolution}) {
    auto c = ExperimentConfig::defaults(e);
    auto back = ExperimentConfig::from_json_text(c.to_json_text(), e);
    EXPECT_EQ(back.to_json_text(), c.to_json_text()) << to_string(e);
  }
}

TEST(Config, DefaultsPassStepChecks) {
  for (Experiment e : {Experiment::AccuracySweep, Experiment::SplittingTable, Experiment::Efficiency,
                       Experiment::InvariantsLongTime, Experiment::ModeEvolution})
    EXPECT_NO_THROW(check_steps(ExperimentConfig::defaults(e))) << to_string(e);
}

TEST(Config, StepAndGuardViolations) {
  auto t = ExperimentConfig::defaults(Experiment::SplittingTable);
  t.eps = {0.5};  // T = pi/2 is not a whole number of steps pi
  t.splitting_n = {2};
  EXPECT_THROW(check_steps(t), ConfigError);
  auto inv = ExperimentConfig::defaults(Experiment::InvariantsLongTime);
  inv.size_x = 128;
  EXPECT_THROW(check_steps(inv), ConfigError);
  inv.cfl_guard = false;
  EXPECT_NO_THROW(check_steps(inv));
  auto modes = ExperimentConfig::defaults(Experiment::ModeEvolution);
  modes.modes.emplace_back(60, 0);
  EXPECT_THROW(check_steps(modes), ConfigError);
}

TEST(Accuracy, SelfComparisonIsExact) {
  auto cfg = ExperimentConfig::from_json_text(kSmallAccuracy, Experiment::AccuracySweep);
  RunReport r = run_accuracy_sweep(cfg);
  ASSERT_EQ(r.runs.size(), 2u);
  for (const auto& run : r.runs) {
    EXPECT_TRUE(run.ok) << run.message;
    EXPECT_LT(run.error, 1e-10);
  }
}

TEST(Accuracy, OutputIndependentOfThreadCount) {
  auto cfg = ExperimentConfig::from_json_text(kSmallAccuracy, Experiment::AccuracySweep);
  cfg.reference.kind = "splitting";
  cfg.reference.splitting_n = 64;
  cfg.macro_steps = {1, 2, 4};
  cfg.micro_n = {8, 16, 32};
  const fs::path a = scratch_dir("threads1"), b = scratch_dir("threads3");
  write_outputs(run_accuracy_sweep(cfg, {1}), a.string());
  write_outputs(run_accuracy_sweep(cfg, {3}), b.string());
  const std::string csv = slurp(a / "accuracy.csv");
  EXPECT_EQ(csv, slurp(b / "accuracy.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), schema::accuracy);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Table, RefinedReferenceAndSchema) {
  auto cfg = ExperimentConfig::from_json_text(
      R"({"eps": [0.125], "size_x": 32, "splitting_n": [64, 128], "reference": {"refine_factor": 8}})",
      Experiment::SplittingTable);
  RunReport r = run_splitting_table(cfg);
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_GT(r.runs[0].error / r.runs[1].error, 6.0);
  EXPECT_EQ(r.runs[0].method, "TSFP4");
  EXPECT_EQ(splitting_label(Model::GrossPitaevskii1D, 2), "TSHP2");
}

TEST(Analysis, LogLogFit) {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  LineFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, -2.0, 1e-12);
  EXPECT_NEAR(f.at(16.0), 3.0 / 256.0, 1e-14);
  EXPECT_THROW(fit_loglog({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({1.0, 2.0}, {1.0, 0.0}), std::invalid_argument);
}

TEST(Analysis, SignificantDigitMatch) {
  EXPECT_TRUE(matches_significant(6.173e-2, 6.17e-2, 3));
  EXPECT_TRUE(matches_significant(6.173e-2, 6.2e-2));
  EXPECT_FALSE(matches_significant(6.26e-2, 6.2e-2));
  EXPECT_TRUE(matches_significant(4.776e-6, 4.8e-6));
  EXPECT_FALSE(matches_significant(4.7e-6, 4.8e-6 + 1e-12, 3));
}

TEST(Analysis, PlateauActivationAndEnvelope) {
  EXPECT_EQ(above_plateau({1.0, 0.2, 0.05, 0.01}, 0.01, 10.0), (std::vector<std::size_t>{0, 1}));
  auto t = activation_time({0, 1, 2, 3}, {0.0, 0.1, 0.5, 0.2}, 0.3);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(*t, 2.0);
  EXPECT_FALSE(activation_time({0, 1}, {0.0, 0.1}, 0.3).has_value());
  auto env = lower_envelope({{4, 1.0}, {2, 3.0}, {4, 0.5}, {2, NAN}, {8, 0.1}});
  ASSERT_EQ(env.size(), 3u);
  EXPECT_EQ(env[0].x, 2.0);
  EXPECT_EQ(env[1].y, 0.5);
}
