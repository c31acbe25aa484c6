#pragma once

// End-to-end experiment: load -> split -> fit -> score -> sweep -> select ->
// holdout evaluation -> directed vs generic comparison, with every artifact
// written under the output directory.

#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "pdm/cmapss.hpp"
#include "pdm/config.hpp"
#include "pdm/cox.hpp"
#include "pdm/plot.hpp"
#include "pdm/policy.hpp"
#include "pdm/simulator.hpp"
#include "pdm/trajectory.hpp"

namespace pdm {

inline constexpr const char* kToolVersion = "1.0.0";

// Published figures the run is set against in the summary table.
struct ReferenceValues {
  std::optional<double> lambda_star;
  std::optional<double> failure_probability;
};

inline ReferenceValues reference_values(const std::string& label) {
  static const std::map<std::string, ReferenceValues> table{
      {"FD001", {17.5, 0.28}}, {"FD002", {10.0, 0.15}}, {"FD003", {22.0, 0.22}},
      {"FD004", {9.0, 0.55}},  {"COMBINED", {9.0, std::nullopt}}};
  auto it = table.find(label);
  return it == table.end() ? ReferenceValues{} : it->second;
}
inline constexpr double kReferenceTotalCost = 76e6;
inline constexpr double kReferenceSavingsPct = 13.0;

struct DatasetOutcome {
  std::string label;
  std::size_t engines = 0;
  std::size_t train_engines = 0;
  std::size_t holdout_engines = 0;
  CoxModel model;
  LambdaGrid grid;
  SweepResult sweep;
  PolicyEvaluation holdout;
  std::vector<HazardTrajectory> train_trajectories;
  std::vector<HazardTrajectory> full_trajectories;
  double all_restore_cost = 0.0;  // n0 * C1
  double all_replace_cost = 0.0;  // n0 * C2
};

struct PipelineResult {
  std::vector<DatasetOutcome> datasets;  // configured subsets in order, COMBINED last
  ComparisonReport comparison;
  std::string config_hash;
  std::vector<std::string> artifacts;  // relative to the output directory, sorted
};

namespace detail {

inline nlohmann::json evaluation_json(const PolicyEvaluation& ev) {
  return {{"lambda", ev.threshold},
          {"maintained", ev.maintained_count},
          {"failed", ev.failed_count},
          {"cost", std::llround(ev.total_cost)},
          {"failure_prob", ev.failure_probability}};
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {}
  void write(const std::string& rel, const std::string& content) {
    write_file_atomic(root_ / rel, content);
    std::lock_guard lock(mu_);
    written_.insert(rel);
  }
  void plot(const std::string& rel, const PlotSpec& spec) { write(rel, render_svg(spec)); }
  void bars(const std::string& rel, const BarChartSpec& spec) { write(rel, render_bar_chart(spec)); }
  std::vector<std::string> written() const {
    std::lock_guard lock(mu_);
    return {written_.begin(), written_.end()};
  }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::set<std::string> written_;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline DatasetOutcome run_dataset(const ExperimentConfig& config, const Dataset& data, ArtifactWriter& out) {
  DatasetOutcome o;
  o.label = std::string(to_string(data.label));
  const std::string dir = o.label + "/";
  o.engines = data.size();

  const auto split = split_by_unit(data, config.holdout_fraction, config.holdout_seed);
  o.train_engines = split.train.size();
  o.holdout_engines = split.holdout.size();

  const auto cp = to_counting_process(split.train.engines, config.preprocess);
  o.model = fit_cox(cp, config.fit);
  out.write(dir + "model.json", dump_json(to_json(o.model)));

  o.train_trajectories = score_dataset(o.model, split.train, config.smoothing);
  o.full_trajectories = score_dataset(o.model, data, config.smoothing);
  const auto holdout_trajectories = score_dataset(o.model, split.holdout, config.smoothing);
  out.write(dir + "trajectories.csv", trajectories_csv(o.train_trajectories));
  out.write(dir + "summary.csv", trajectory_summary_csv(o.train_trajectories));
  out.write(dir + "holdout_summary.csv", trajectory_summary_csv(holdout_trajectories));

  const auto max_scores = max_scores_of(o.train_trajectories);
  o.grid = resolve_grid(config, max_scores);
  o.sweep = bootstrap_sweep(std::span<const double>(max_scores), simulation_config(config, o.grid), config.costs);
  out.write(dir + "sweep.csv", sweep_csv(o.sweep));

  std::string det = policy_evaluation_csv_header();
  for (const auto& ev : deterministic_sweep(o.train_trajectories, o.grid, config.costs)) {
    det += policy_evaluation_csv_row(ev);
  }
  out.write(dir + "deterministic_sweep.csv", det);

  o.holdout = evaluate_policy(holdout_trajectories, o.sweep.optimal_lambda, config.costs);
  out.write(dir + "holdout_evaluation.csv", policy_evaluation_csv_header() + policy_evaluation_csv_row(o.holdout));

  o.all_restore_cost = static_cast<double>(config.sample_size) * config.costs.restoration_cost;
  o.all_replace_cost = static_cast<double>(config.sample_size) * config.costs.replacement_cost;

  // Plots: every plotted number is in sweep.csv, trajectories.csv or results.json.
  Series cost{"mean cost", {}, {}, {}, ""};
  Series prob{"mean failure probability", {}, {}, {}, ""};
  for (const auto& p : o.sweep.points) {
    cost.x.push_back(p.lambda);
    cost.y.push_back(p.cost_mean);
    cost.spread.push_back(p.cost_std);
    prob.x.push_back(p.lambda);
    prob.y.push_back(p.prob_mean);
    prob.spread.push_back(p.prob_std);
  }
  const std::string star = "lambda* = " + format_double(o.sweep.optimal_lambda);
  PlotSpec cost_plot{o.label + ": total cost vs threshold", "lambda", "total cost (USD)", {cost}, {}, true};
  cost_plot.references.push_back({ReferenceLine::Axis::x, o.sweep.optimal_lambda, star});
  out.plot(dir + "cost_vs_lambda.svg", cost_plot);
  PlotSpec prob_plot{o.label + ": failure probability vs threshold", "lambda", "failure probability", {prob}, {},
                     true};
  prob_plot.references.push_back({ReferenceLine::Axis::x, o.sweep.optimal_lambda, star});
  out.plot(dir + "failure_prob_vs_lambda.svg", prob_plot);

  PlotSpec traj{o.label + ": hazard score trajectories", "cycle", "log partial hazard", {}, {}, false, 0.6};
  for (std::size_t i = 0; i < o.train_trajectories.size(); ++i) {
    const auto& tr = o.train_trajectories[i];
    Series s{tr.unit_key, {}, tr.scores, {}, detail::kPalette[i % detail::kPalette.size()]};
    for (std::size_t t = 0; t < tr.scores.size(); ++t) s.x.push_back(static_cast<double>(t + 1));
    traj.series.push_back(std::move(s));
  }
  traj.references.push_back({ReferenceLine::Axis::y, o.sweep.optimal_lambda, star});
  out.plot(dir + "trajectories.svg", traj);
  return o;
}

inline nlohmann::json dataset_json(const DatasetOutcome& o) {
  const auto& diag = o.model.diagnostics;
  const double c = o.sweep.optimal_cost_mean;
  nlohmann::json j{{"label", o.label},
                   {"engines", o.engines},
                   {"train_engines", o.train_engines},
                   {"holdout_engines", o.holdout_engines},
                   {"covariates", o.model.spec.names},
                   {"fit_converged", diag.converged},
                   {"fit_iterations", diag.iterations},
                   {"fit_notes", diag.notes},
                   {"grid", {{"lambda_min", o.grid.lambda_min}, {"lambda_max", o.grid.lambda_max},
                             {"step", o.grid.step}}},
                   {"lambda_star", o.sweep.optimal_lambda},
                   {"cost_at_lambda_star", std::llround(c)},
                   {"failure_prob_at_lambda_star", o.sweep.optimal_prob_mean},
                   {"all_restore_cost", std::llround(o.all_restore_cost)},
                   {"all_replace_cost", std::llround(o.all_replace_cost)},
                   {"savings_vs_all_restore_pct", 100.0 * (o.all_restore_cost - c) / o.all_restore_cost},
                   {"savings_vs_all_replace_pct", 100.0 * (o.all_replace_cost - c) / o.all_replace_cost},
                   {"holdout", evaluation_json(o.holdout)}};
  return j;
}

}  // namespace detail

// Loads every configured subset; COMBINED is their union.
inline std::vector<Dataset> load_configured_datasets(const ExperimentConfig& config) {
  std::vector<Dataset> out;
  const SubsetLabel labels[] = {SubsetLabel::FD001, SubsetLabel::FD002, SubsetLabel::FD003, SubsetLabel::FD004};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!config.data_paths[i].empty()) out.push_back(load_dataset(labels[i], config.data_paths[i]));
  }
  if (out.empty()) throw UsageError("no data paths configured");
  out.push_back(combine_datasets(out));
  return out;
}

inline PipelineResult run_pipeline_on(const ExperimentConfig& config, const std::vector<Dataset>& datasets,
                                      std::ostream* log = nullptr) {
  config.validate(false);
  if (datasets.size() < 2 || datasets.back().label != SubsetLabel::COMBINED) {
    throw UsageError("pipeline needs at least one subset followed by COMBINED");
  }
  detail::ArtifactWriter out(config.output_dir);
  PipelineResult result;
  result.config_hash = config_hash(config);

  auto write_manifest = [&](const std::string& status, const Error* err) {
    nlohmann::json files = nlohmann::json::object();
    for (const auto& rel : out.written()) files[rel] = detail::hex64(fnv1a64(read_file(out.root() / rel)));
    nlohmann::json m{{"tool", "pdm"},
                     {"version", kToolVersion},
                     {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                           "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"config_hash", result.config_hash},
                     {"config", dump_config(config, false)},
                     {"status", status},
                     {"artifacts", files}};
    if (err) m["error"] = {{"kind", err->kind()}, {"message", err->what()}};
    write_file_atomic(out.root() / "manifest.json", detail::dump_json(m));
  };

  // Subsets are independent workloads and run concurrently; each writes only
  // under its own directory.
  std::vector<std::optional<DatasetOutcome>> outcomes(datasets.size());
  std::vector<std::exception_ptr> errors(datasets.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          outcomes[i] = detail::run_dataset(config, datasets[i], out);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }

  try {
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      if (!errors[i]) continue;
      const std::string label(to_string(datasets[i].label));
      try {
        std::rethrow_exception(errors[i]);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(label + ": " + e.what(), e.beta, e.diagnostics);
      } catch (const NumericalError& e) {
        throw NumericalError(label + ": " + e.what());
      } catch (const DataError& e) {
        throw DataError(label + ": " + e.what());
      } catch (const UsageError& e) {
        throw UsageError(label + ": " + e.what());
      } catch (const std::exception& e) {
        throw NumericalError(label + ": " + e.what());
      }
    }
    for (auto& o : outcomes) result.datasets.push_back(std::move(*o));

    std::vector<SubsetSweep> subsets;
    for (std::size_t i = 0; i + 1 < result.datasets.size(); ++i) {
      const auto& o = result.datasets[i];
      subsets.push_back({o.label, o.sweep, o.full_trajectories});
    }
    result.comparison = compare_directed_vs_generic(subsets, result.datasets.back().sweep, config.costs);
    out.write("comparison.json", detail::dump_json(to_json(result.comparison)));

    BarChartSpec bars{"directed vs generic threshold: total cost", "total cost (USD)", {}, {}};
    Series directed{"directed (per-subset lambda*)", {}, {}, {}, ""};
    Series generic{"generic (combined lambda*)", {}, {}, {}, ""};
    for (const auto& s : result.comparison.per_subset) {
      bars.categories.push_back(s.label);
      directed.y.push_back(s.directed_cost);
      generic.y.push_back(s.generic_cost);
    }
    bars.groups = {directed, generic};
    out.bars("comparison.svg", bars);

    nlohmann::json per = nlohmann::json::array();
    for (const auto& o : result.datasets) per.push_back(detail::dataset_json(o));
    out.write("results.json", detail::dump_json({{"datasets", per}}));

    std::string lambdas = "dataset,lambda_star,cost_mean,prob_mean,holdout_cost,holdout_failure_prob\n";
    for (const auto& o : result.datasets) {
      lambdas += o.label + "," + format_double(o.sweep.optimal_lambda) + "," +
                 format_currency(o.sweep.optimal_cost_mean) + "," + format_double(o.sweep.optimal_prob_mean) + "," +
                 format_currency(o.holdout.total_cost) + "," + format_double(o.holdout.failure_probability) + "\n";
    }
    out.write("lambda_star.csv", lambdas);
  } catch (const Error& e) {
    write_manifest("FAILED", &e);
    throw;
  }
  result.artifacts = out.written();
  write_manifest("OK", nullptr);
  result.artifacts.push_back("manifest.json");
  std::sort(result.artifacts.begin(), result.artifacts.end());
  if (log) {
    for (const auto& o : result.datasets) {
      *log << o.label << ": engines=" << o.engines << " lambda*=" << format_double(o.sweep.optimal_lambda)
           << " cost=" << format_currency(o.sweep.optimal_cost_mean)
           << " failure_prob=" << format_double(o.sweep.optimal_prob_mean) << "\n";
    }
  }
  return result;
}

inline PipelineResult run_pipeline(const ExperimentConfig& config, std::ostream* log = nullptr) {
  config.validate(true);
  return run_pipeline_on(config, load_configured_datasets(config), log);
}

// Achieved vs published values, one row per dataset.
inline std::string reference_table(const PipelineResult& r) {
  auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string("-"); };
  char line[256];
  std::string s;
  std::snprintf(line, sizeof line, "%-9s %8s %10s %12s %12s %14s\n", "dataset", "engines", "lambda*", "ref lambda*",
                "fail prob", "ref fail prob");
  s += line;
  for (const auto& o : r.datasets) {
    const auto ref = reference_values(o.label);
    std::snprintf(line, sizeof line, "%-9s %8zu %10s %12s %12.4f %14s\n", o.label.c_str(), o.engines,
                  format_double(o.sweep.optimal_lambda).c_str(), opt(ref.lambda_star).c_str(),
                  o.sweep.optimal_prob_mean, opt(ref.failure_probability).c_str());
    s += line;
  }
  std::snprintf(line, sizeof line, "combined cost at lambda*: %s (reference %s)\n",
                format_currency(r.datasets.back().sweep.optimal_cost_mean).c_str(),
                format_currency(kReferenceTotalCost).c_str());
  s += line;
  std::snprintf(line, sizeof line, "directed vs generic savings: %.4f%% (reference about %.0f%%)\n",
                r.comparison.savings_pct, kReferenceSavingsPct);
  s += line;
  return s;
}

}  // namespace pdm
