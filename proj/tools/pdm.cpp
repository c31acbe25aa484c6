// pdm: command-line driver for the hazard-threshold maintenance experiment.

#include "CLI11.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pdm/cmapss.hpp"
#include "pdm/config.hpp"
#include "pdm/cox.hpp"
#include "pdm/pipeline.hpp"
#include "pdm/plot.hpp"
#include "pdm/policy.hpp"
#include "pdm/simulator.hpp"
#include "pdm/trajectory.hpp"

namespace {

using namespace pdm;

// Flags that shadow a config key. Only flags actually given override.
struct ConfigFlags {
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::optional<std::string>> mapped{
      {"data.fd001", {}},          {"data.fd002", {}},           {"data.fd003", {}},
      {"data.fd004", {}},          {"fit.tie_method", {}},       {"fit.tolerance", {}},
      {"fit.max_iterations", {}},  {"score.smoothing_window", {}}, {"cost.restoration", {}},
      {"cost.replacement", {}},    {"simulation.sample_size", {}}, {"simulation.replications", {}},
      {"simulation.seed", {}},     {"simulation.lambda_min", {}}, {"simulation.lambda_max", {}},
      {"simulation.lambda_step", {}}, {"evaluation.holdout_fraction", {}}, {"evaluation.holdout_seed", {}},
      {"output.dir", {}},          {"runtime.threads", {}}};
  std::optional<bool> standardize;

  static std::string flag_name(const std::string& key) {
    std::string name = key.substr(key.find('.') + 1);
    for (auto& c : name) c = c == '_' ? '-' : c;
    return "--" + name;
  }

  void attach(CLI::App& app) {
    app.add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "override any key: section.key=value");
    for (auto& [key, value] : mapped) {
      std::string flag = flag_name(key);
      if (key == "output.dir") flag = "-o,--output-dir";
      app.add_option(flag, value, "overrides " + key);
    }
    app.add_flag("--standardize,!--no-standardize", standardize, "z-score covariates");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config_path ? load_config(*config_path) : ExperimentConfig{};
    for (const auto& s : sets) apply_override(c, s);
    for (const auto& [key, value] : mapped) {
      if (value) apply_override(c, key + "=" + *value);
    }
    if (standardize) c.preprocess.standardize = *standardize;
    return c;
  }
};

Dataset load_subset(const std::string& label, const std::string& path) {
  const auto l = parse_subset_label(label);
  if (l == SubsetLabel::COMBINED) throw UsageError("load a single subset; COMBINED is built by 'run'");
  return load_dataset(l, path);
}

void emit(const std::optional<std::string>& path, const std::string& content) {
  if (path) {
    write_file_atomic(*path, content);
  } else {
    std::cout << content;
  }
}

LambdaGrid grid_for(const ExperimentConfig& c, const std::vector<HazardTrajectory>& trs) {
  const auto m = max_scores_of(trs);
  return resolve_grid(c, m);
}

int run(int argc, char** argv) {
  CLI::App app{"Hazard-threshold predictive maintenance experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  ConfigFlags flags;
  flags.attach(app);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  std::string subset = "FD001";
  std::string input, model_path, summary_path, sweep_path, traj_path;
  std::optional<std::string> output;
  std::optional<std::string> summary_out;
  double lambda = 0.0;

  auto* ingest = app.add_subcommand("ingest", "convert a raw training file to canonical CSV");
  ingest->add_option("-s,--subset", subset, "subset label")->capture_default_str();
  ingest->add_option("-i,--input", input, "raw whitespace-separated file")->required();
  ingest->add_option("--out", output, "output CSV (default stdout)");

  auto* fit = app.add_subcommand("fit", "fit the Cox model on a raw training file");
  fit->add_option("-s,--subset", subset, "subset label")->capture_default_str();
  fit->add_option("-i,--input", input, "raw whitespace-separated file")->required();
  fit->add_option("--out", output, "model JSON (default stdout)");

  auto* score = app.add_subcommand("score", "per-cycle hazard scores from a fitted model");
  score->add_option("-s,--subset", subset, "subset label")->capture_default_str();
  score->add_option("-i,--input", input, "raw whitespace-separated file")->required();
  score->add_option("-m,--model", model_path, "model JSON")->required();
  score->add_option("--out", output, "unit,cycle,score CSV (default stdout)");
  score->add_option("--summary-out", summary_out, "unit,max_score,failure_cycle CSV");

  auto* sweep = app.add_subcommand("sweep", "bootstrap cost and failure probability over a lambda grid");
  sweep->add_option("--summary", summary_path, "unit,max_score,failure_cycle CSV")->required();
  sweep->add_option("--out", output, "sweep CSV (default stdout)");

  auto* optimize = app.add_subcommand("optimize", "select lambda* from a sweep CSV");
  optimize->add_option("--sweep", sweep_path, "sweep CSV")->required();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate the policy at a fixed lambda");
  evaluate->add_option("--summary", summary_path, "unit,max_score,failure_cycle CSV")->required();
  evaluate->add_option("-l,--lambda", lambda, "threshold")->required();
  evaluate->add_option("--out", output, "evaluation CSV (default stdout)");

  std::vector<std::string> compare_subsets;
  std::string combined_sweep;
  auto* compare = app.add_subcommand("compare", "directed (per-subset) vs generic (combined) thresholds");
  compare->add_option("--subset-data", compare_subsets, "LABEL=summary.csv:sweep.csv, repeatable")->required();
  compare->add_option("--combined-sweep", combined_sweep, "sweep CSV of the combined dataset")->required();
  compare->add_option("--out", output, "comparison JSON (default stdout)");

  auto* runcmd = app.add_subcommand("run", "full pipeline over every configured subset");

  std::string plot_kind = "cost";
  std::optional<double> plot_lambda;
  auto* plot = app.add_subcommand("plot", "render an SVG from a sweep or trajectory CSV");
  plot->add_option("--kind", plot_kind, "cost | prob | trajectories")
      ->check(CLI::IsMember({"cost", "prob", "trajectories"}))
      ->capture_default_str();
  plot->add_option("--sweep", sweep_path, "sweep CSV (cost, prob)");
  plot->add_option("--trajectories", traj_path, "unit,cycle,score CSV (trajectories)");
  plot->add_option("-l,--lambda", plot_lambda, "threshold line");
  plot->add_option("--out", output, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  const ExperimentConfig config = flags.resolve();
  if (print_config) {
    std::cout << dump_config(config);
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return static_cast<int>(ExitCode::usage);
  }

  if (ingest->parsed()) {
    emit(output, to_canonical_csv(load_subset(subset, input)));
  } else if (fit->parsed()) {
    config.validate(false);
    const auto ds = load_subset(subset, input);
    const auto model = fit_cox(to_counting_process(ds.engines, config.preprocess), config.fit);
    emit(output, to_json(model).dump(2) + "\n");
    std::cerr << "fit: " << model.beta.size() << " covariates, " << model.diagnostics.iterations
              << " iterations, log-likelihood " << format_double(model.diagnostics.log_likelihood) << "\n";
  } else if (score->parsed()) {
    config.validate(false);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(model_path));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("model JSON: ") + e.what());
    }
    const auto model = cox_model_from_json(j);
    const auto trs = score_dataset(model, load_subset(subset, input), config.smoothing);
    emit(output, trajectories_csv(trs));
    if (summary_out) write_file_atomic(*summary_out, trajectory_summary_csv(trs));
  } else if (sweep->parsed()) {
    config.validate(false);
    const auto trs = parse_trajectory_summary_csv(read_file(summary_path));
    const auto result = bootstrap_sweep(trs, simulation_config(config, grid_for(config, trs)), config.costs);
    emit(output, sweep_csv(result));
  } else if (optimize->parsed()) {
    const auto r = parse_sweep_csv(read_file(sweep_path));
    std::cout << nlohmann::json{{"lambda_star", r.optimal_lambda},
                                {"cost_mean", std::llround(r.optimal_cost_mean)},
                                {"prob_mean", r.optimal_prob_mean}}
                     .dump()
              << "\n";
  } else if (evaluate->parsed()) {
    config.validate(false);
    const auto trs = parse_trajectory_summary_csv(read_file(summary_path));
    emit(output, policy_evaluation_csv_header() + policy_evaluation_csv_row(evaluate_policy(trs, lambda, config.costs)));
  } else if (compare->parsed()) {
    config.validate(false);
    std::vector<SubsetSweep> subsets;
    for (const auto& spec : compare_subsets) {
      const auto eq = spec.find('=');
      const auto colon = spec.find(':', eq == std::string::npos ? 0 : eq);
      if (eq == std::string::npos || colon == std::string::npos) {
        throw UsageError("--subset-data expects LABEL=summary.csv:sweep.csv, got " + spec);
      }
      subsets.push_back({spec.substr(0, eq), parse_sweep_csv(read_file(spec.substr(colon + 1))),
                         parse_trajectory_summary_csv(read_file(spec.substr(eq + 1, colon - eq - 1)))});
    }
    const auto report =
        compare_directed_vs_generic(subsets, parse_sweep_csv(read_file(combined_sweep)), config.costs);
    emit(output, to_json(report).dump(2) + "\n");
  } else if (runcmd->parsed()) {
    const auto result = run_pipeline(config, &std::cerr);
    std::cerr << reference_table(result);
    std::cout << "artifacts written to " << config.output_dir << " (config hash " << result.config_hash << ")\n";
  } else if (plot->parsed()) {
    if (plot_kind == "trajectories") {
      if (traj_path.empty()) throw UsageError("--kind trajectories needs --trajectories");
      PlotSpec spec{"hazard score trajectories", "cycle", "log partial hazard", {}, {}, false, 0.6};
      for (const auto& tr : parse_trajectories_csv(read_file(traj_path))) {
        Series s{tr.unit_key, {}, tr.scores, {}, "#1f77b4"};
        for (std::size_t t = 0; t < tr.scores.size(); ++t) s.x.push_back(static_cast<double>(t + 1));
        spec.series.push_back(std::move(s));
      }
      if (plot_lambda) spec.references.push_back({ReferenceLine::Axis::y, *plot_lambda, "lambda"});
      emit_plot(*output, spec);
    } else {
      if (sweep_path.empty()) throw UsageError("--kind " + plot_kind + " needs --sweep");
      const auto r = parse_sweep_csv(read_file(sweep_path));
      const bool cost = plot_kind == "cost";
      Series s{cost ? "mean cost" : "mean failure probability", {}, {}, {}, ""};
      for (const auto& p : r.points) {
        s.x.push_back(p.lambda);
        s.y.push_back(cost ? p.cost_mean : p.prob_mean);
        s.spread.push_back(cost ? p.cost_std : p.prob_std);
      }
      PlotSpec spec{cost ? "total cost vs threshold" : "failure probability vs threshold", "lambda",
                    cost ? "total cost (USD)" : "failure probability", {s}, {}, true};
      spec.references.push_back({ReferenceLine::Axis::x, plot_lambda.value_or(r.optimal_lambda), "lambda*"});
      emit_plot(*output, spec);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pdm::Error& e) {
    std::cerr << nlohmann::json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << nlohmann::json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
    return static_cast<int>(pdm::ExitCode::usage);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", {{"kind", "numerical"}, {"message", e.what()}}}}.dump() << "\n";
    return static_cast<int>(pdm::ExitCode::numerical);
  }
}
