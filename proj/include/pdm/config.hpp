#pragma once

// Experiment configuration: INI-style sections of key = value pairs.
// Resolution order is default < config file < command-line override.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "pdm/cmapss.hpp"
#include "pdm/cox.hpp"
#include "pdm/error.hpp"
#include "pdm/format.hpp"
#include "pdm/policy.hpp"
#include "pdm/simulator.hpp"
#include "pdm/trajectory.hpp"

namespace pdm {

struct ExperimentConfig {
  std::array<std::string, 4> data_paths;  // FD001..FD004, empty = not used
  PreprocessOptions preprocess;
  FitConfig fit;
  Smoothing smoothing;
  CostParams costs;
  // Simulation. Grid bounds left unset are derived per dataset from its scores.
  std::size_t sample_size = 30;
  std::size_t replications = 10;
  std::uint64_t seed = 20220101;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  double lambda_step = 0.5;
  double holdout_fraction = 0.2;
  std::uint64_t holdout_seed = 7;
  std::string output_dir = "out";
  // Runtime only: never changes results, so it is kept out of the hash.
  unsigned threads = 1;

  void validate(bool check_paths = true) const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& v) {
  auto d = parse_double(v);
  if (!d || !std::isfinite(*d)) throw UsageError(key + ": expected a number, got '" + v + "'");
  return *d;
}

inline long long to_integer(const std::string& key, const std::string& v, long long lo) {
  auto i = parse_integer(v);
  if (!i) throw UsageError(key + ": expected an integer, got '" + v + "'");
  if (*i < lo) throw UsageError(key + ": must be >= " + std::to_string(lo));
  return *i;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError(key + ": expected true/false, got '" + v + "'");
}

inline std::optional<double> to_optional_double(const std::string& key, const std::string& v) {
  if (v == "auto" || v.empty()) return std::nullopt;
  return to_double(key, v);
}

inline std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

}  // namespace detail

// Sets one field by its dotted name, e.g. "simulation.seed". Relative data
// paths are resolved against base_dir when one is given.
inline void set_config_value(ExperimentConfig& c, const std::string& section, const std::string& key,
                             const std::string& value, const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  const std::string name = section + "." + key;
  if (section == "data") {
    for (std::size_t i = 0; i < 4; ++i) {
      if (key == "fd00" + std::to_string(i + 1)) {
        std::filesystem::path p(value);
        if (!value.empty() && p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.data_paths[i] = value.empty() ? std::string() : p.lexically_normal().string();
        return;
      }
    }
  } else if (section == "preprocess") {
    if (key == "standardize") return void(c.preprocess.standardize = to_bool(name, value));
  } else if (section == "fit") {
    if (key == "tolerance") return void(c.fit.tolerance = to_double(name, value));
    if (key == "max_iterations") return void(c.fit.max_iterations = static_cast<int>(to_integer(name, value, 1)));
    if (key == "tie_method") {
      try {
        c.fit.tie_method = parse_tie_method(value);
      } catch (const Error&) {
        throw UsageError(name + ": expected efron or breslow, got '" + value + "'");
      }
      return;
    }
    if (key == "max_halvings") return void(c.fit.max_halvings = static_cast<int>(to_integer(name, value, 0)));
    if (key == "separation_bound") return void(c.fit.separation_bound = to_double(name, value));
    if (key == "condition_limit") return void(c.fit.condition_limit = to_double(name, value));
  } else if (section == "score") {
    if (key == "smoothing_window") return void(c.smoothing.window = static_cast<int>(to_integer(name, value, 1)));
  } else if (section == "cost") {
    if (key == "restoration") return void(c.costs.restoration_cost = to_double(name, value));
    if (key == "replacement") return void(c.costs.replacement_cost = to_double(name, value));
  } else if (section == "simulation") {
    if (key == "sample_size") return void(c.sample_size = static_cast<std::size_t>(to_integer(name, value, 1)));
    if (key == "replications") return void(c.replications = static_cast<std::size_t>(to_integer(name, value, 1)));
    if (key == "seed") return void(c.seed = static_cast<std::uint64_t>(to_integer(name, value, 0)));
    if (key == "lambda_min") return void(c.lambda_min = to_optional_double(name, value));
    if (key == "lambda_max") return void(c.lambda_max = to_optional_double(name, value));
    if (key == "lambda_step") return void(c.lambda_step = to_double(name, value));
  } else if (section == "evaluation") {
    if (key == "holdout_fraction") return void(c.holdout_fraction = to_double(name, value));
    if (key == "holdout_seed") return void(c.holdout_seed = static_cast<std::uint64_t>(to_integer(name, value, 0)));
  } else if (section == "output") {
    if (key == "dir") return void(c.output_dir = value);
  } else if (section == "runtime") {
    if (key == "threads") return void(c.threads = static_cast<unsigned>(to_integer(name, value, 1)));
  }
  throw UsageError("unknown configuration key: " + name);
}

// "section.key=value"
inline void apply_override(ExperimentConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.substr(0, eq).find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos) {
    throw UsageError("override must look like section.key=value: " + std::string(assignment));
  }
  set_config_value(c, detail::trim(assignment.substr(0, dot)), detail::trim(assignment.substr(dot + 1, eq - dot - 1)),
                   detail::trim(assignment.substr(eq + 1)));
}

inline void apply_config_text(ExperimentConfig& c, std::string_view text, const std::filesystem::path& base_dir = {}) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    // Inline comments need whitespace before the marker.
    std::string_view body(raw);
    for (std::size_t i = 1; i < body.size(); ++i) {
      if ((body[i] == ';' || body[i] == '#') && (body[i - 1] == ' ' || body[i - 1] == '\t')) {
        body = body.substr(0, i);
        break;
      }
    }
    const std::string line = detail::trim(body);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw UsageError("unterminated section header");
        section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw UsageError("expected key = value");
      if (section.empty()) throw UsageError("key outside of any section");
      set_config_value(c, section, detail::trim(std::string_view(line).substr(0, eq)),
                       detail::trim(std::string_view(line).substr(eq + 1)), base_dir);
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw UsageError("config file not found: " + path.string());
  ExperimentConfig c;
  apply_config_text(c, read_file(path), path.parent_path());
  return c;
}

// Fully resolved configuration in the same format the parser reads.
// include_runtime=false gives the text that is hashed.
inline std::string dump_config(const ExperimentConfig& c, bool include_runtime = true) {
  using detail::optional_text;
  std::string s;
  s += "[data]\n";
  for (std::size_t i = 0; i < 4; ++i) s += "fd00" + std::to_string(i + 1) + " = " + c.data_paths[i] + "\n";
  s += "\n[preprocess]\nstandardize = " + std::string(c.preprocess.standardize ? "true" : "false") + "\n";
  s += "\n[fit]\ntolerance = " + format_double(c.fit.tolerance) + "\n";
  s += "max_iterations = " + std::to_string(c.fit.max_iterations) + "\n";
  s += "tie_method = " + std::string(to_string(c.fit.tie_method)) + "\n";
  s += "max_halvings = " + std::to_string(c.fit.max_halvings) + "\n";
  s += "separation_bound = " + format_double(c.fit.separation_bound) + "\n";
  s += "condition_limit = " + format_double(c.fit.condition_limit) + "\n";
  s += "\n[score]\nsmoothing_window = " + std::to_string(c.smoothing.window) + "\n";
  s += "\n[cost]\nrestoration = " + format_double(c.costs.restoration_cost) + "\n";
  s += "replacement = " + format_double(c.costs.replacement_cost) + "\n";
  s += "\n[simulation]\nsample_size = " + std::to_string(c.sample_size) + "\n";
  s += "replications = " + std::to_string(c.replications) + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "lambda_min = " + optional_text(c.lambda_min) + "\n";
  s += "lambda_max = " + optional_text(c.lambda_max) + "\n";
  s += "lambda_step = " + format_double(c.lambda_step) + "\n";
  s += "\n[evaluation]\nholdout_fraction = " + format_double(c.holdout_fraction) + "\n";
  s += "holdout_seed = " + std::to_string(c.holdout_seed) + "\n";
  s += "\n[output]\ndir = " + c.output_dir + "\n";
  if (include_runtime) s += "\n[runtime]\nthreads = " + std::to_string(c.threads) + "\n";
  return s;
}

inline std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(dump_config(c, false))));
  return buf;
}

inline void ExperimentConfig::validate(bool check_paths) const {
  bool any = false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (data_paths[i].empty()) continue;
    any = true;
    if (check_paths && !std::filesystem::exists(data_paths[i])) {
      throw UsageError("data.fd00" + std::to_string(i + 1) + ": file not found: " + data_paths[i]);
    }
  }
  if (check_paths && !any) throw UsageError("no data paths configured ([data] fd001..fd004)");
  if (!(fit.tolerance > 0.0)) throw UsageError("fit.tolerance must be positive");
  if (!(fit.separation_bound > 0.0)) throw UsageError("fit.separation_bound must be positive");
  if (!(fit.condition_limit > 1.0)) throw UsageError("fit.condition_limit must exceed 1");
  costs.validate();
  if (!(lambda_step > 0.0)) throw UsageError("simulation.lambda_step must be positive");
  if (lambda_min && lambda_max && !(*lambda_min < *lambda_max)) {
    throw UsageError("simulation.lambda_min must be below lambda_max");
  }
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw UsageError("evaluation.holdout_fraction must be in (0, 1)");
  }
  if (output_dir.empty()) throw UsageError("output.dir must not be empty");
}

// Grid for one dataset: configured bounds where given, else derived from scores.
inline LambdaGrid resolve_grid(const ExperimentConfig& c, std::span<const double> max_scores) {
  LambdaGrid g = LambdaGrid::covering(max_scores, c.lambda_step);
  if (c.lambda_min) g.lambda_min = *c.lambda_min;
  if (c.lambda_max) g.lambda_max = *c.lambda_max;
  g.validate();
  return g;
}

inline SimulationConfig simulation_config(const ExperimentConfig& c, const LambdaGrid& grid) {
  SimulationConfig s;
  s.sample_size = c.sample_size;
  s.replications = c.replications;
  s.seed = c.seed;
  s.grid = grid;
  s.threads = c.threads;
  return s;
}

}  // namespace pdm
