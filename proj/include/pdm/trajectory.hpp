#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pdm/cmapss.hpp"
#include "pdm/cox.hpp"
#include "pdm/error.hpp"
#include "pdm/format.hpp"

namespace pdm {

struct Smoothing {
  int window = 1;  // 1 = raw scores
};

struct HazardTrajectory {
  std::string unit_key;
  std::vector<double> scores;  // one per cycle, cycle 1 first
  double max_score = -std::numeric_limits<double>::infinity();
  int failure_cycle = 0;
};

// Trailing moving average over the last min(window, t) values.
inline std::vector<double> causal_moving_average(std::span<const double> raw, int window) {
  if (window < 1) throw UsageError("smoothing window must be a positive integer");
  std::vector<double> out(raw.size());
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const std::size_t len = std::min(t + 1, w);
    // Direct sum per window; a running sum would drift.
    double s = 0.0;
    double lo = raw[t];
    double hi = raw[t];
    for (std::size_t k = t + 1 - len; k <= t; ++k) {
      s += raw[k];
      lo = std::min(lo, raw[k]);
      hi = std::max(hi, raw[k]);
    }
    // The mean lies in [lo, hi]; clamp away rounding excursions.
    out[t] = len == 1 ? raw[t] : std::clamp(s / static_cast<double>(len), lo, hi);
  }
  return out;
}

inline HazardTrajectory make_trajectory(std::string unit_key, std::span<const double> raw_scores,
                                        const Smoothing& smoothing = {}) {
  HazardTrajectory tr;
  tr.unit_key = std::move(unit_key);
  tr.scores = causal_moving_average(raw_scores, smoothing.window);
  tr.failure_cycle = static_cast<int>(tr.scores.size());
  for (double s : tr.scores) tr.max_score = std::max(tr.max_score, s);
  return tr;
}

inline HazardTrajectory score_engine(const CoxModel& model, const EngineRun& engine,
                                     const Smoothing& smoothing = {}) {
  if (engine.rows.empty()) throw DataError("engine " + engine.key + " has no rows");
  std::vector<double> raw;
  raw.reserve(engine.rows.size());
  for (const auto& row : engine.rows) raw.push_back(log_partial_hazard(model, row));
  return make_trajectory(engine.key, raw, smoothing);
}

inline std::vector<HazardTrajectory> score_dataset(const CoxModel& model, const Dataset& dataset,
                                                   const Smoothing& smoothing = {}) {
  std::vector<HazardTrajectory> out;
  out.reserve(dataset.engines.size());
  for (const auto& e : dataset.engines) {
    try {
      out.push_back(score_engine(model, e, smoothing));
    } catch (const UsageError& err) {
      throw UsageError("engine " + e.key + ": " + err.what());
    } catch (const DataError& err) {
      throw DataError("engine " + e.key + ": " + err.what());
    }
  }
  return out;
}

// CSV unit,cycle,score
inline std::string trajectories_csv(const std::vector<HazardTrajectory>& trajectories) {
  std::string out = "unit,cycle,score\n";
  for (const auto& tr : trajectories) {
    for (std::size_t t = 0; t < tr.scores.size(); ++t) {
      out += tr.unit_key + "," + std::to_string(t + 1) + "," + format_double(tr.scores[t]) + "\n";
    }
  }
  return out;
}

// CSV unit,max_score,failure_cycle
inline std::string trajectory_summary_csv(const std::vector<HazardTrajectory>& trajectories) {
  std::string out = "unit,max_score,failure_cycle\n";
  for (const auto& tr : trajectories) {
    out += tr.unit_key + "," + format_double(tr.max_score) + "," + std::to_string(tr.failure_cycle) + "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) f.push_back(tok);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

template <typename RowFn>
void read_csv(const std::string& text, const std::string& header, std::size_t fields, RowFn&& fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) throw ParseError(1, "expected header '" + header + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != fields) throw ParseError(line_no, "expected " + std::to_string(fields) + " fields");
    fn(line_no, f);
  }
  if (line_no == 0) throw DataError("empty file");
}

inline double csv_number(std::size_t line_no, const std::string& tok) {
  auto v = parse_double(tok);
  if (!v || !std::isfinite(*v)) throw ParseError(line_no, "non-numeric field '" + tok + "'");
  return *v;
}

}  // namespace detail

// Reads unit,max_score,failure_cycle. The per-cycle scores are not part of
// the summary, so the trajectories carry only their maxima.
inline std::vector<HazardTrajectory> parse_trajectory_summary_csv(const std::string& text) {
  std::vector<HazardTrajectory> out;
  detail::read_csv(text, "unit,max_score,failure_cycle", 3, [&](std::size_t ln, const std::vector<std::string>& f) {
    HazardTrajectory tr;
    tr.unit_key = f[0];
    tr.max_score = detail::csv_number(ln, f[1]);
    auto fc = parse_integer(f[2]);
    if (!fc || *fc < 1) throw ParseError(ln, "bad failure_cycle '" + f[2] + "'");
    tr.failure_cycle = static_cast<int>(*fc);
    out.push_back(std::move(tr));
  });
  if (out.empty()) throw DataError("summary file has no rows");
  return out;
}

// Reads unit,cycle,score; cycles of a unit must be contiguous from 1.
inline std::vector<HazardTrajectory> parse_trajectories_csv(const std::string& text) {
  std::vector<HazardTrajectory> out;
  detail::read_csv(text, "unit,cycle,score", 3, [&](std::size_t ln, const std::vector<std::string>& f) {
    auto cycle = parse_integer(f[1]);
    if (!cycle) throw ParseError(ln, "bad cycle '" + f[1] + "'");
    const double v = detail::csv_number(ln, f[2]);
    if (out.empty() || out.back().unit_key != f[0]) {
      if (*cycle != 1) throw ParseError(ln, "unit " + f[0] + " must start at cycle 1");
      out.push_back({f[0], {}, -std::numeric_limits<double>::infinity(), 0});
    }
    auto& tr = out.back();
    if (*cycle != static_cast<long long>(tr.scores.size()) + 1) throw ParseError(ln, "non-contiguous cycle");
    tr.scores.push_back(v);
    tr.max_score = std::max(tr.max_score, v);
    tr.failure_cycle = static_cast<int>(tr.scores.size());
  });
  if (out.empty()) throw DataError("trajectory file has no rows");
  return out;
}

}  // namespace pdm
