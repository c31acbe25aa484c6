#pragma once

// C-MAPSS run-to-failure text files: one row per flight cycle with
// unit, cycle, 3 operational settings and 21 sensors, whitespace separated.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdm/error.hpp"
#include "pdm/format.hpp"
#include "pdm/rng.hpp"

namespace pdm {

inline constexpr std::size_t kOpSettings = 3;
inline constexpr std::size_t kSensors = 21;
inline constexpr std::size_t kRawCovariates = kOpSettings + kSensors;  // 24
inline constexpr std::size_t kColumns = 2 + kRawCovariates;            // 26

struct MeasurementRow {
  int unit_id = 0;
  int cycle = 0;
  // os1..os3 followed by s1..s21
  std::array<double, kRawCovariates> values{};

  double op_setting(std::size_t i) const { return values.at(i); }
  double sensor(std::size_t i) const { return values.at(kOpSettings + i - 1); }  // 1-based

  friend bool operator==(const MeasurementRow&, const MeasurementRow&) = default;
};

struct EngineRun {
  std::string key;  // unique within a dataset
  int unit_id = 0;
  std::vector<MeasurementRow> rows;
  int failure_cycle = 0;

  friend bool operator==(const EngineRun&, const EngineRun&) = default;
};

enum class SubsetLabel { FD001, FD002, FD003, FD004, COMBINED };

inline std::string_view to_string(SubsetLabel label) {
  switch (label) {
    case SubsetLabel::FD001: return "FD001";
    case SubsetLabel::FD002: return "FD002";
    case SubsetLabel::FD003: return "FD003";
    case SubsetLabel::FD004: return "FD004";
    case SubsetLabel::COMBINED: return "COMBINED";
  }
  return "?";
}

inline SubsetLabel parse_subset_label(std::string_view s) {
  for (auto l : {SubsetLabel::FD001, SubsetLabel::FD002, SubsetLabel::FD003, SubsetLabel::FD004,
                 SubsetLabel::COMBINED}) {
    if (to_string(l) == s) return l;
  }
  throw UsageError("unknown subset label: " + std::string(s));
}

struct Dataset {
  SubsetLabel label = SubsetLabel::COMBINED;
  std::vector<EngineRun> engines;

  std::size_t size() const { return engines.size(); }
  std::size_t row_count() const {
    std::size_t n = 0;
    for (const auto& e : engines) n += e.rows.size();
    return n;
  }
};

inline std::vector<std::string> raw_column_names() {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= kOpSettings; ++i) names.push_back("os" + std::to_string(i));
  for (std::size_t i = 1; i <= kSensors; ++i) names.push_back("s" + std::to_string(i));
  return names;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// One EngineRun per unit, in order of first appearance. Keys are the decimal
// unit ids; make_dataset() re-keys with the subset label.
inline std::vector<EngineRun> parse_measurement_file(std::istream& in) {
  std::vector<EngineRun> engines;
  std::set<int> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != kColumns) {
      throw ParseError(line_no, "expected " + std::to_string(kColumns) + " columns, found " +
                                    std::to_string(tokens.size()));
    }
    MeasurementRow row;
    auto unit = parse_integer(tokens[0]);
    auto cycle = parse_integer(tokens[1]);
    if (!unit) throw ParseError(line_no, "non-integer unit id '" + std::string(tokens[0]) + "'");
    if (!cycle) throw ParseError(line_no, "non-integer cycle '" + std::string(tokens[1]) + "'");
    if (*unit < 1) throw ParseError(line_no, "unit id must be positive");
    row.unit_id = static_cast<int>(*unit);
    row.cycle = static_cast<int>(*cycle);
    for (std::size_t c = 0; c < kRawCovariates; ++c) {
      auto v = parse_double(tokens[c + 2]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(line_no, "non-numeric token '" + std::string(tokens[c + 2]) + "' in column " +
                                      std::to_string(c + 3));
      }
      row.values[c] = *v;
    }

    if (engines.empty() || engines.back().unit_id != row.unit_id) {
      if (!seen.insert(row.unit_id).second) {
        throw DataError("unit " + std::to_string(row.unit_id) + ": rows are not contiguous (line " +
                        std::to_string(line_no) + ")");
      }
      if (row.cycle != 1) {
        throw DataError("unit " + std::to_string(row.unit_id) + ": first cycle is " +
                        std::to_string(row.cycle) + ", expected 1");
      }
      EngineRun run;
      run.key = std::to_string(row.unit_id);
      run.unit_id = row.unit_id;
      engines.push_back(std::move(run));
    } else if (row.cycle != engines.back().rows.back().cycle + 1) {
      throw DataError("unit " + std::to_string(row.unit_id) + ": cycle " + std::to_string(row.cycle) +
                      " follows " + std::to_string(engines.back().rows.back().cycle) + " (line " +
                      std::to_string(line_no) + ")");
    }
    engines.back().rows.push_back(row);
    engines.back().failure_cycle = row.cycle;
  }
  return engines;
}

inline std::vector<EngineRun> parse_measurement_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_measurement_file(in);
}

inline std::string engine_key(SubsetLabel label, int unit_id) {
  return std::string(to_string(label)) + "-" + std::to_string(unit_id);
}

inline Dataset make_dataset(SubsetLabel label, std::vector<EngineRun> engines) {
  Dataset ds{label, std::move(engines)};
  if (label != SubsetLabel::COMBINED) {
    for (auto& e : ds.engines) e.key = engine_key(label, e.unit_id);
  }
  return ds;
}

inline Dataset load_dataset(SubsetLabel label, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open data file: " + path.string());
  try {
    return make_dataset(label, parse_measurement_file(in));
  } catch (const ParseError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// Serializes back to the distribution format (space separated, no header).
inline std::string serialize_measurements(const std::vector<EngineRun>& engines) {
  std::string out;
  for (const auto& e : engines) {
    for (const auto& r : e.rows) {
      out += std::to_string(r.unit_id);
      out += ' ';
      out += std::to_string(r.cycle);
      for (double v : r.values) {
        out += ' ';
        out += format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

// Canonical CSV: unit,cycle,os1,os2,os3,s1..s21 with the engine key as unit.
inline std::string to_canonical_csv(const Dataset& ds) {
  std::string out = "unit,cycle";
  for (const auto& n : raw_column_names()) out += "," + n;
  out += '\n';
  for (const auto& e : ds.engines) {
    for (const auto& r : e.rows) {
      out += e.key;
      out += ',';
      out += std::to_string(r.cycle);
      for (double v : r.values) {
        out += ',';
        out += format_double(v);
      }
      out += '\n';
    }
  }
  return out;
}

// Concatenates datasets. Engines from labelled subsets are keyed
// "<label>-<unit>"; engines already in a COMBINED dataset keep their key.
inline Dataset combine_datasets(const std::vector<Dataset>& parts) {
  if (parts.empty()) throw UsageError("combine_datasets: no datasets given");
  Dataset out;
  out.label = SubsetLabel::COMBINED;
  std::set<std::string> keys;
  for (const auto& part : parts) {
    for (const auto& e : part.engines) {
      EngineRun copy = e;
      if (part.label != SubsetLabel::COMBINED) copy.key = engine_key(part.label, e.unit_id);
      if (!keys.insert(copy.key).second) {
        throw UsageError("combine_datasets: duplicate engine key " + copy.key);
      }
      out.engines.push_back(std::move(copy));
    }
  }
  return out;
}

struct DatasetSplit {
  Dataset train;
  Dataset holdout;
};

// Unit-level partition. Holdout size is round(fraction * n) clamped to
// [1, n-1]; both parts keep the input order.
inline DatasetSplit split_by_unit(const Dataset& ds, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw UsageError("holdout fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.engines.size();
  if (n < 2) throw UsageError("split_by_unit needs at least 2 engines");
  auto k = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::vector<bool> in_holdout(n, false);
  for (std::size_t i = 0; i < k; ++i) in_holdout[order[i]] = true;

  DatasetSplit split{{ds.label, {}}, {ds.label, {}}};
  for (std::size_t i = 0; i < n; ++i) {
    (in_holdout[i] ? split.holdout : split.train).engines.push_back(ds.engines[i]);
  }
  return split;
}

}  // namespace pdm
