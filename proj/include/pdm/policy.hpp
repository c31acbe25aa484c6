#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pdm/error.hpp"
#include "pdm/format.hpp"
#include "pdm/trajectory.hpp"

namespace pdm {

struct CostParams {
  double restoration_cost = 3.5e6;  // preventive maintenance
  double replacement_cost = 4.0e6;  // engine failed before maintenance

  void validate() const {
    if (!(restoration_cost > 0.0 && restoration_cost < replacement_cost)) {
      throw UsageError("costs must satisfy 0 < restoration < replacement");
    }
  }
};

enum class Decision { fly, maintain };

// Maintain once the preflight hazard score reaches the threshold.
constexpr Decision decide(double score, double threshold) {
  return score >= threshold ? Decision::maintain : Decision::fly;
}

struct PolicyEvaluation {
  double threshold = 0.0;
  std::size_t maintained_count = 0;
  std::size_t failed_count = 0;
  double total_cost = 0.0;
  double failure_probability = 0.0;

  std::size_t engines() const { return maintained_count + failed_count; }
};

// Evaluates on per-engine maximum scores directly; an engine is maintained
// iff its trajectory reaches the threshold at some cycle.
inline PolicyEvaluation evaluate_max_scores(std::span<const double> max_scores, double threshold,
                                            const CostParams& costs) {
  if (max_scores.empty()) throw UsageError("evaluate_policy: no trajectories");
  PolicyEvaluation ev;
  ev.threshold = threshold;
  for (double m : max_scores) {
    if (decide(m, threshold) == Decision::maintain) {
      ++ev.maintained_count;
    } else {
      ++ev.failed_count;
    }
  }
  ev.total_cost = static_cast<double>(ev.maintained_count) * costs.restoration_cost +
                  static_cast<double>(ev.failed_count) * costs.replacement_cost;
  ev.failure_probability = static_cast<double>(ev.failed_count) / static_cast<double>(max_scores.size());
  return ev;
}

inline std::vector<double> max_scores_of(const std::vector<HazardTrajectory>& trajectories) {
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) out.push_back(t.max_score);
  return out;
}

inline PolicyEvaluation evaluate_policy(const std::vector<HazardTrajectory>& trajectories, double threshold,
                                        const CostParams& costs) {
  const auto m = max_scores_of(trajectories);
  return evaluate_max_scores(m, threshold, costs);
}

inline std::string policy_evaluation_csv_header() { return "lambda,maintained,failed,cost,failure_prob\n"; }

inline std::string policy_evaluation_csv_row(const PolicyEvaluation& ev) {
  return format_double(ev.threshold) + "," + std::to_string(ev.maintained_count) + "," +
         std::to_string(ev.failed_count) + "," + format_currency(ev.total_cost) + "," +
         format_double(ev.failure_probability) + "\n";
}

}  // namespace pdm
