#pragma once

// Threshold search: deterministic and bootstrap sweeps over a lambda grid,
// argmin selection, and the directed (per-subset) vs generic (combined)
// comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pdm/error.hpp"
#include "pdm/format.hpp"
#include "pdm/policy.hpp"
#include "pdm/rng.hpp"

namespace pdm {

struct LambdaGrid {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double step = 0.5;

  void validate() const {
    if (!std::isfinite(lambda_min) || !std::isfinite(lambda_max) || !std::isfinite(step)) {
      throw UsageError("lambda grid values must be finite");
    }
    if (!(step > 0.0)) throw UsageError("lambda grid step must be positive");
    if (!(lambda_min < lambda_max)) throw UsageError("lambda grid needs lambda_min < lambda_max");
  }

  // lambda_min + j*step for every j with the value <= lambda_max (up to a
  // 1e-9*step allowance so a closing endpoint on the lattice is included).
  std::vector<double> points() const {
    validate();
    std::vector<double> out;
    for (std::size_t j = 0;; ++j) {
      const double v = lambda_min + static_cast<double>(j) * step;
      if (v > lambda_max + 1e-9 * step) break;
      out.push_back(v);
    }
    if (out.empty()) throw UsageError("lambda grid has no points");
    return out;
  }

  // [floor(min)-1, ceil(max)+1] over the engines' maximum scores.
  static LambdaGrid covering(std::span<const double> max_scores, double step = 0.5) {
    if (max_scores.empty()) throw UsageError("cannot derive a lambda grid from no engines");
    const auto [lo, hi] = std::minmax_element(max_scores.begin(), max_scores.end());
    return {std::floor(*lo) - 1.0, std::ceil(*hi) + 1.0, step};
  }
};

struct SimulationConfig {
  std::size_t sample_size = 30;  // engines drawn per replication, with replacement
  std::size_t replications = 10;
  std::uint64_t seed = 20220101;
  LambdaGrid grid;
  unsigned threads = 1;

  void validate() const {
    if (sample_size < 1) throw UsageError("sample size must be >= 1");
    if (replications < 1) throw UsageError("replications must be >= 1");
    grid.validate();
  }
};

struct SweepPoint {
  double lambda = 0.0;
  double cost_mean = 0.0;
  double cost_std = 0.0;
  double prob_mean = 0.0;
  double prob_std = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double optimal_lambda = 0.0;
  double optimal_cost_mean = 0.0;
  double optimal_prob_mean = 0.0;
};

inline std::vector<PolicyEvaluation> deterministic_sweep(const std::vector<HazardTrajectory>& trajectories,
                                                         const LambdaGrid& grid, const CostParams& costs) {
  if (trajectories.empty()) throw UsageError("deterministic_sweep: no trajectories");
  const auto scores = max_scores_of(trajectories);
  std::vector<PolicyEvaluation> out;
  for (double lambda : grid.points()) out.push_back(evaluate_max_scores(scores, lambda, costs));
  return out;
}

// Smallest lambda among the cost_mean minimizers.
inline std::size_t select_threshold_index(const std::vector<SweepPoint>& points) {
  if (points.empty()) throw UsageError("select_threshold: no points");
  std::size_t best = 0;
  for (std::size_t j = 1; j < points.size(); ++j) {
    const auto& p = points[j];
    const auto& b = points[best];
    if (p.cost_mean < b.cost_mean || (p.cost_mean == b.cost_mean && p.lambda < b.lambda)) best = j;
  }
  return best;
}

inline double select_threshold(const std::vector<SweepPoint>& points) {
  return points[select_threshold_index(points)].lambda;
}

inline SweepResult finalize_sweep(std::vector<SweepPoint> points) {
  SweepResult r;
  r.points = std::move(points);
  const auto& best = r.points[select_threshold_index(r.points)];
  r.optimal_lambda = best.lambda;
  r.optimal_cost_mean = best.cost_mean;
  r.optimal_prob_mean = best.prob_mean;
  return r;
}

// Full-population sweep expressed as a SweepResult with zero spread.
inline SweepResult sweep_result_from(const std::vector<PolicyEvaluation>& evaluations) {
  std::vector<SweepPoint> points;
  for (const auto& ev : evaluations) points.push_back({ev.threshold, ev.total_cost, 0.0, ev.failure_probability, 0.0});
  return finalize_sweep(std::move(points));
}

namespace detail {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Population standard deviation (divide by k).
inline MeanStd mean_std(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace detail

// Replication r (1-based) draws sample_size engines with replacement from
// the stream Rng(seed, r), then evaluates every grid point on that multiset.
inline SweepResult bootstrap_sweep(std::span<const double> max_scores, const SimulationConfig& config,
                                   const CostParams& costs) {
  config.validate();
  if (max_scores.empty()) throw UsageError("bootstrap_sweep: no trajectories");
  const auto lambdas = config.grid.points();
  const std::size_t k = config.replications;
  const std::size_t g = lambdas.size();
  const std::size_t n = max_scores.size();

  std::vector<double> cost(k * g);
  std::vector<double> prob(k * g);
  auto run_replication = [&](std::size_t r) {
    Rng rng(config.seed, r + 1);
    std::vector<double> sample(config.sample_size);
    for (auto& s : sample) s = max_scores[rng.below(n)];
    std::sort(sample.begin(), sample.end());
    const auto n0 = static_cast<double>(sample.size());
    for (std::size_t j = 0; j < g; ++j) {
      const auto first_maintained = std::lower_bound(sample.begin(), sample.end(), lambdas[j]);
      const auto failed = static_cast<double>(first_maintained - sample.begin());
      const double maintained = n0 - failed;
      cost[r * g + j] = maintained * costs.restoration_cost + failed * costs.replacement_cost;
      prob[r * g + j] = failed / n0;
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(k)));
  if (threads == 1) {
    for (std::size_t r = 0; r < k; ++r) run_replication(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < k; r += threads) run_replication(r);
      });
    }
  }

  std::vector<SweepPoint> points(g);
  std::vector<double> col(k);
  for (std::size_t j = 0; j < g; ++j) {
    points[j].lambda = lambdas[j];
    for (std::size_t r = 0; r < k; ++r) col[r] = cost[r * g + j];
    const auto c = detail::mean_std(col);
    for (std::size_t r = 0; r < k; ++r) col[r] = prob[r * g + j];
    const auto p = detail::mean_std(col);
    points[j].cost_mean = c.mean;
    points[j].cost_std = c.std;
    points[j].prob_mean = p.mean;
    points[j].prob_std = p.std;
  }
  return finalize_sweep(std::move(points));
}

inline SweepResult bootstrap_sweep(const std::vector<HazardTrajectory>& trajectories, const SimulationConfig& config,
                                   const CostParams& costs) {
  const auto scores = max_scores_of(trajectories);
  return bootstrap_sweep(std::span<const double>(scores), config, costs);
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "lambda,cost_mean,cost_std,prob_mean,prob_std\n";
  for (const auto& p : r.points) {
    out += format_double(p.lambda) + "," + format_currency(p.cost_mean) + "," + format_currency(p.cost_std) + "," +
           format_double(p.prob_mean) + "," + format_double(p.prob_std) + "\n";
  }
  return out;
}

inline SweepResult parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<SweepPoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "lambda,cost_mean,cost_std,prob_mean,prob_std") throw ParseError(1, "unexpected sweep header");
      continue;
    }
    std::vector<double> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto v = parse_double(tok);
      if (!v) throw ParseError(line_no, "non-numeric field '" + tok + "'");
      f.push_back(*v);
    }
    if (f.size() != 5) throw ParseError(line_no, "expected 5 fields");
    points.push_back({f[0], f[1], f[2], f[3], f[4]});
  }
  if (points.empty()) throw DataError("sweep file has no rows");
  return finalize_sweep(std::move(points));
}

struct SubsetSweep {
  std::string label;
  SweepResult result;
  std::vector<HazardTrajectory> trajectories;
};

struct SubsetComparison {
  std::string label;
  std::size_t engines = 0;
  double directed_lambda = 0.0;
  double directed_cost = 0.0;
  double directed_failure_prob = 0.0;
  double generic_cost = 0.0;
  double generic_failure_prob = 0.0;
};

struct ComparisonReport {
  double generic_lambda = 0.0;
  double directed_total = 0.0;
  double generic_total = 0.0;
  double difference = 0.0;   // generic - directed
  double savings_pct = 0.0;  // 100 * difference / generic
  std::vector<SubsetComparison> per_subset;
};

// Directed: each subset at its own lambda*. Generic: every subset at the
// combined lambda*. Both costed on the full subset population.
inline ComparisonReport compare_directed_vs_generic(const std::vector<SubsetSweep>& subsets,
                                                    const SweepResult& combined, const CostParams& costs) {
  if (subsets.empty()) throw UsageError("compare: no subsets");
  std::set<std::string> labels;
  for (const auto& s : subsets) {
    if (!labels.insert(s.label).second) throw UsageError("compare: duplicate subset " + s.label);
    if (s.trajectories.empty()) throw UsageError("compare: subset " + s.label + " has no trajectories");
    if (s.result.points.empty()) throw UsageError("compare: subset " + s.label + " has no sweep");
  }
  ComparisonReport rep;
  rep.generic_lambda = combined.optimal_lambda;
  for (const auto& s : subsets) {
    const auto directed = evaluate_policy(s.trajectories, s.result.optimal_lambda, costs);
    const auto generic = evaluate_policy(s.trajectories, combined.optimal_lambda, costs);
    rep.per_subset.push_back({s.label, s.trajectories.size(), s.result.optimal_lambda, directed.total_cost,
                              directed.failure_probability, generic.total_cost, generic.failure_probability});
    rep.directed_total += directed.total_cost;
    rep.generic_total += generic.total_cost;
  }
  rep.difference = rep.generic_total - rep.directed_total;
  rep.savings_pct = 100.0 * rep.difference / rep.generic_total;
  return rep;
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : r.per_subset) {
    per.push_back({{"subset", s.label},
                   {"engines", s.engines},
                   {"directed_lambda", s.directed_lambda},
                   {"directed_cost", std::llround(s.directed_cost)},
                   {"directed_failure_prob", s.directed_failure_prob},
                   {"generic_cost", std::llround(s.generic_cost)},
                   {"generic_failure_prob", s.generic_failure_prob}});
  }
  return {{"generic_lambda", r.generic_lambda},
          {"directed_total", std::llround(r.directed_total)},
          {"generic_total", std::llround(r.generic_total)},
          {"difference", std::llround(r.difference)},
          {"savings_pct", r.savings_pct},
          {"per_subset", per}};
}

}  // namespace pdm
