#include "strobo/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace strobo::harness {

using nlohmann::json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::AccuracySweep: return "accuracy";
    case Experiment::SplittingTable: return "table";
    case Experiment::Efficiency: return "efficiency";
    case Experiment::InvariantsLongTime: return "invariants";
    case Experiment::ModeEvolution: return "modes";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::AccuracySweep, Experiment::SplittingTable, Experiment::Efficiency,
                       Experiment::InvariantsLongTime, Experiment::ModeEvolution})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

namespace {

std::vector<double> dyadic(int from, int to) {
  std::vector<double> out;
  for (int j = from; j <= to; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

std::vector<long> powers_of_two(int from, int to) {
  std::vector<long> out;
  for (int j = from; j <= to; ++j) out.push_back(1L << j);
  return out;
}

std::vector<int> range(int from, int to) {
  std::vector<int> out;
  for (int j = from; j <= to; ++j) out.push_back(j);
  return out;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(Experiment e, bool published_scale) {
  ExperimentConfig c;
  c.experiment = e;
  c.reference.published_scale = published_scale;
  switch (e) {
    case Experiment::AccuracySweep:
      c.model = Model::TorusNLS1D;
      if (published_scale) {
        // eps H = pi / 2^j, j = 5..11, h = pi / 2^12; h = pi / 2^j, j = 5..11, H = pi / (2^12 eps)
        c.eps = dyadic(5, 10);
        c.size_x = 256;
        c.macro_steps = powers_of_two(3, 9);
        c.fixed_micro_n = 1L << 13;
        c.micro_n = powers_of_two(6, 12);
        c.fixed_macro_steps = 1L << 10;
      } else {
        c.eps = dyadic(5, 8);
        c.size_x = 64;
        // One macro step is pre-asymptotic; the coarsest micro steps are too.
        c.macro_steps = powers_of_two(1, 7);
        c.fixed_micro_n = 1024;
        c.micro_n = powers_of_two(7, 10);
        c.fixed_macro_steps = 128;
      }
      break;
    case Experiment::SplittingTable:
      c.model = Model::TorusNLS1D;
      c.size_x = 256;
      c.eps = published_scale ? dyadic(3, 9) : dyadic(3, 6);
      c.splitting_n = published_scale ? powers_of_two(5, 10) : powers_of_two(5, 8);
      c.reference.kind = "refine";
      break;
    case Experiment::Efficiency:
      c.model = Model::TorusNLS1D;
      if (published_scale) {
        c.eps = {std::ldexp(1.0, -12), std::ldexp(1.0, -14), std::ldexp(1.0, -16), std::ldexp(1.0, -18)};
        c.size_x = 256;
        c.envelope_j = range(0, 10);
        c.envelope_k = range(0, 10);
        c.splitting_n = powers_of_two(4, 12);
      } else {
        c.eps = {std::ldexp(1.0, -10), std::ldexp(1.0, -12)};
        c.size_x = 64;
        c.envelope_j = range(0, 7);
        c.envelope_k = range(2, 7);
        c.splitting_n = powers_of_two(7, 10);
        c.reference.kind = "splitting";
        c.reference.splitting_n = 8192;
      }
      break;
    case Experiment::InvariantsLongTime:
      c.model = Model::TorusNLS1D;
      c.size_x = 32;
      c.micro_order = 2;
      c.stencil = 2;
      c.schemes = {MacroScheme::RK2, MacroScheme::RK4, MacroScheme::ImplicitMidpoint};
      c.horizon_power = 2;
      c.fixed_micro_n = 512;
      // eps H = pi / 2^7 over T0 / eps^2 gives 32 / eps macro steps.
      c.eps = {published_scale ? std::ldexp(1.0, -11) : std::ldexp(1.0, -7)};
      c.fixed_macro_steps = long(std::lround(32.0 / c.eps.front()));
      break;
    case Experiment::ModeEvolution:
      c.model = Model::GrossPitaevskii1D;
      if (published_scale) {
        c.eps = {1e-4};
        c.size_x = 80;
        c.fixed_macro_steps = 10000;
        c.fixed_micro_n = 400;
        c.modes_splitting_n = 1000;
        c.sample_interval = 100.0 * kTwoPi;
        c.fam_step = kTwoPi;
      } else {
        // Three times T0/eps so that Hermite modes up to 7 pass the eps level.
        c.eps = {0.01};
        c.size_x = 40;
        c.final_time = 300.0 * kTwoPi;
        c.fixed_macro_steps = 600;
        c.fixed_micro_n = 200;
        c.modes_splitting_n = 1000;
        c.sample_interval = kTwoPi;
        c.fam_step = kTwoPi;
      }
      for (int k = 0; k <= 7; ++k) c.modes.emplace_back(k, 0);
      c.reference.kind = "splitting";
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_text(std::string_view text, Experiment expected, bool published_scale) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("experiment") && parse_experiment(get<std::string>(j, "experiment")) != expected)
    throw ConfigError("config is for experiment '" + get<std::string>(j, "experiment") + "', not '" +
                      std::string(to_string(expected)) + "'");
  if (j.contains("published_scale")) published_scale = published_scale || get<bool>(j, "published_scale");

  ExperimentConfig c = defaults(expected, published_scale);
  static const std::set<std::string> known = {
      "experiment", "published_scale", "model", "eps", "eps_log2", "size_x", "size_y", "micro_order", "ordering",
      "stencil", "schemes", "horizon_power", "final_time", "macro_steps", "micro_n", "fixed_macro_steps",
      "fixed_micro_n", "splitting_n", "envelope_j", "envelope_k", "envelope_base_n", "cfl_guard", "modes",
      "sample_interval", "sample_periods", "fam_quad", "fam_step", "fam_step_periods", "modes_splitting_n",
      "reference", "seed"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");

  if (j.contains("model")) c.model = parse_model(get<std::string>(j, "model"));
  if (j.contains("eps")) c.eps = get<std::vector<double>>(j, "eps");
  if (j.contains("eps_log2")) {
    c.eps.clear();
    for (int e : get<std::vector<int>>(j, "eps_log2")) c.eps.push_back(std::ldexp(1.0, e));
  }
  if (j.contains("size_x")) c.size_x = get<int>(j, "size_x");
  if (j.contains("size_y")) c.size_y = get<int>(j, "size_y");
  if (j.contains("micro_order")) c.micro_order = get<int>(j, "micro_order");
  if (j.contains("ordering")) c.ordering = parse_split_ordering(get<std::string>(j, "ordering"));
  if (j.contains("stencil")) c.stencil = get<int>(j, "stencil");
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : get<std::vector<std::string>>(j, "schemes")) c.schemes.push_back(parse_macro_scheme(s));
  }
  if (j.contains("horizon_power")) c.horizon_power = get<int>(j, "horizon_power");
  if (j.contains("final_time")) c.final_time = get<double>(j, "final_time");
  if (j.contains("macro_steps")) c.macro_steps = get<std::vector<long>>(j, "macro_steps");
  if (j.contains("micro_n")) c.micro_n = get<std::vector<long>>(j, "micro_n");
  if (j.contains("fixed_macro_steps")) c.fixed_macro_steps = get<long>(j, "fixed_macro_steps");
  if (j.contains("fixed_micro_n")) c.fixed_micro_n = get<long>(j, "fixed_micro_n");
  if (j.contains("splitting_n")) c.splitting_n = get<std::vector<long>>(j, "splitting_n");
  if (j.contains("envelope_j")) c.envelope_j = get<std::vector<int>>(j, "envelope_j");
  if (j.contains("envelope_k")) c.envelope_k = get<std::vector<int>>(j, "envelope_k");
  if (j.contains("envelope_base_n")) c.envelope_base_n = get<long>(j, "envelope_base_n");
  if (j.contains("cfl_guard")) c.cfl_guard = get<bool>(j, "cfl_guard");
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j.at("modes")) {
      if (!m.is_array() || m.size() != 2) throw ConfigError("modes entries must be [kx, ky] pairs");
      c.modes.emplace_back(m[0].get<int>(), m[1].get<int>());
    }
  }
  if (j.contains("sample_interval")) c.sample_interval = get<double>(j, "sample_interval");
  if (j.contains("sample_periods")) c.sample_interval = get<double>(j, "sample_periods") * kTwoPi;
  if (j.contains("fam_quad")) c.fam_quad = get<int>(j, "fam_quad");
  if (j.contains("fam_step")) c.fam_step = get<double>(j, "fam_step");
  if (j.contains("fam_step_periods")) c.fam_step = get<double>(j, "fam_step_periods") * kTwoPi;
  if (j.contains("modes_splitting_n")) c.modes_splitting_n = get<long>(j, "modes_splitting_n");
  if (j.contains("seed")) c.seed = get<unsigned long>(j, "seed");
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    if (!r.is_object()) throw ConfigError("reference must be an object");
    static const std::set<std::string> rkeys = {"kind",        "splitting_n",   "sam_macro_steps", "sam_micro_n",
                                                "refine_factor", "use_cache", "cache_dir"};
    for (const auto& item : r.items())
      if (!rkeys.count(item.key())) throw ConfigError("unknown reference key '" + item.key() + "'");
    if (r.contains("kind")) c.reference.kind = get<std::string>(r, "kind");
    if (r.contains("splitting_n")) c.reference.splitting_n = get<long>(r, "splitting_n");
    if (r.contains("sam_macro_steps")) c.reference.sam_macro_steps = get<long>(r, "sam_macro_steps");
    if (r.contains("sam_micro_n")) c.reference.sam_micro_n = get<long>(r, "sam_micro_n");
    if (r.contains("refine_factor")) c.reference.refine_factor = get<long>(r, "refine_factor");
    if (r.contains("use_cache")) c.reference.use_cache = get<bool>(r, "use_cache");
    if (r.contains("cache_dir")) c.reference.cache_dir = get<std::string>(r, "cache_dir");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path, Experiment expected, bool published_scale) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), expected, published_scale);
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["experiment"] = std::string(to_string(experiment));
  j["model"] = std::string(to_string(model));
  j["eps"] = eps;
  j["size_x"] = size_x;
  j["size_y"] = size_y;
  j["micro_order"] = micro_order;
  j["ordering"] = std::string(to_string(ordering));
  j["stencil"] = stencil;
  std::vector<std::string> names;
  for (MacroScheme s : schemes) names.emplace_back(to_string(s));
  j["schemes"] = names;
  j["horizon_power"] = horizon_power;
  j["final_time"] = final_time;
  j["macro_steps"] = macro_steps;
  j["micro_n"] = micro_n;
  j["fixed_macro_steps"] = fixed_macro_steps;
  j["fixed_micro_n"] = fixed_micro_n;
  j["splitting_n"] = splitting_n;
  j["envelope_j"] = envelope_j;
  j["envelope_k"] = envelope_k;
  j["envelope_base_n"] = envelope_base_n;
  j["cfl_guard"] = cfl_guard;
  json m = json::array();
  for (auto [kx, ky] : modes) m.push_back({kx, ky});
  j["modes"] = m;
  j["sample_interval"] = sample_interval;
  j["fam_quad"] = fam_quad;
  j["fam_step"] = fam_step;
  j["modes_splitting_n"] = modes_splitting_n;
  j["seed"] = seed;
  j["published_scale"] = reference.published_scale;
  j["reference"] = {{"kind", reference.kind},
                    {"splitting_n", reference.splitting_n},
                    {"sam_macro_steps", reference.sam_macro_steps},
                    {"sam_micro_n", reference.sam_micro_n},
                    {"refine_factor", reference.refine_factor},
                    {"use_cache", reference.use_cache},
                    {"cache_dir", reference.cache_dir}};
  return j.dump(2);
}

ProblemSpec ExperimentConfig::problem(double epsilon) const { return make_model(model, epsilon, size_x, size_y); }

double ExperimentConfig::horizon(const ProblemSpec& p) const {
  if (final_time > 0.0) return final_time;
  return p.t0() / std::pow(p.epsilon_eff(), double(horizon_power));
}

void ExperimentConfig::validate() const {
  if (eps.empty()) throw ConfigError("eps list is empty");
  for (double e : eps)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("eps values must be positive");
  if (micro_order != 2 && micro_order != 4) throw ConfigError("micro_order must be 2 or 4");
  if (stencil != 2 && stencil != 4 && stencil != 8) throw ConfigError("stencil must be 2, 4 or 8");
  if (horizon_power < 1) throw ConfigError("horizon_power must be >= 1");
  if (schemes.empty()) throw ConfigError("schemes list is empty");
  auto positive = [](const std::vector<long>& v, const char* what) {
    for (long x : v)
      if (x < 1) throw ConfigError(std::string(what) + " entries must be positive integers");
  };
  positive(macro_steps, "macro_steps");
  positive(micro_n, "micro_n");
  positive(splitting_n, "splitting_n");
  const std::set<std::string> kinds = {"auto", "splitting", "sam8", "refine"};
  if (!kinds.count(reference.kind)) throw ConfigError("unknown reference kind '" + reference.kind + "'");
  if (reference.refine_factor < 1) throw ConfigError("refine_factor must be positive");

  switch (experiment) {
    case Experiment::AccuracySweep:
      if (macro_steps.empty() && micro_n.empty()) throw ConfigError("accuracy: no sweep values");
      if (!macro_steps.empty() && fixed_micro_n < 1) throw ConfigError("accuracy: fixed_micro_n required");
      if (!micro_n.empty() && fixed_macro_steps < 1) throw ConfigError("accuracy: fixed_macro_steps required");
      break;
    case Experiment::SplittingTable:
      if (splitting_n.empty()) throw ConfigError("table: splitting_n is empty");
      break;
    case Experiment::Efficiency:
      if (splitting_n.empty() && (envelope_j.empty() || envelope_k.empty()))
        throw ConfigError("efficiency: nothing to run");
      for (int x : envelope_j)
        if (x < 0 || x > 30) throw ConfigError("envelope_j out of range");
      for (int x : envelope_k)
        if (x < 0 || x > 30) throw ConfigError("envelope_k out of range");
      if (envelope_base_n < 1) throw ConfigError("envelope_base_n must be positive");
      break;
    case Experiment::InvariantsLongTime:
      if (model != Model::TorusNLS1D) throw ConfigError("invariants: only torus_nls_1d carries the energy");
      if (fixed_micro_n < 1 || fixed_macro_steps < 1) throw ConfigError("invariants: fixed steps required");
      break;
    case Experiment::ModeEvolution:
      if (modes.empty()) throw ConfigError("modes: no modes listed");
      if (fixed_micro_n < 1 || fixed_macro_steps < 1) throw ConfigError("modes: fixed steps required");
      if (fam_quad < 2 || fam_quad % 2) throw ConfigError("fam_quad must be even");
      break;
  }
}

}  // namespace strobo::harness
