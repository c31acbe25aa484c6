#pragma once

// Cox proportional-hazards model with time-varying covariates in
// counting-process form: partial likelihood (Efron or Breslow ties) with
// analytic gradient and Hessian, Newton-Raphson fitting with step halving,
// and the Breslow baseline hazard.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pdm/cmapss.hpp"
#include "pdm/error.hpp"

namespace pdm {

struct SurvivalRecord {
  std::string unit_key;
  int start = 0;
  int stop = 1;
  bool event = false;
  std::vector<double> covariates;
};

// Frozen preprocessing: which raw columns are used and how they are centered
// and scaled. kept_columns index into MeasurementRow::values.
struct CovariateSpec {
  std::vector<std::string> names;
  std::vector<std::size_t> kept_columns;
  std::vector<double> means;
  std::vector<double> scales;

  std::size_t dimension() const { return kept_columns.size(); }

  std::array<bool, kRawCovariates> kept_mask() const {
    std::array<bool, kRawCovariates> mask{};
    for (auto c : kept_columns) {
      if (c < kRawCovariates) mask[c] = true;
    }
    return mask;
  }

  // (x_kept - mean) / scale for a vector already restricted to kept columns.
  std::vector<double> transform_kept(std::span<const double> kept) const {
    if (kept.size() != dimension()) {
      throw UsageError("covariate dimension mismatch: got " + std::to_string(kept.size()) +
                       ", model expects " + std::to_string(dimension()));
    }
    std::vector<double> z(dimension());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = (kept[j] - means[j]) / scales[j];
    return z;
  }

  std::vector<double> transform(const MeasurementRow& row) const {
    std::vector<double> kept(dimension());
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (kept_columns[j] >= kRawCovariates) throw UsageError("covariate column out of range");
      kept[j] = row.values[kept_columns[j]];
    }
    return transform_kept(kept);
  }

  // Identity preprocessing over d columns, for records built by hand.
  static CovariateSpec identity(std::size_t d) {
    CovariateSpec spec;
    for (std::size_t j = 0; j < d; ++j) {
      spec.names.push_back("x" + std::to_string(j + 1));
      spec.kept_columns.push_back(j);
    }
    spec.means.assign(d, 0.0);
    spec.scales.assign(d, 1.0);
    return spec;
  }

  friend bool operator==(const CovariateSpec&, const CovariateSpec&) = default;
};

struct PreprocessOptions {
  bool standardize = true;
};

struct CountingProcess {
  std::vector<SurvivalRecord> records;
  CovariateSpec spec;

  static CountingProcess from_records(std::vector<SurvivalRecord> records) {
    const std::size_t d = records.empty() ? 0 : records.front().covariates.size();
    return {std::move(records), CovariateSpec::identity(d)};
  }
};

// Engine i contributes t_i unit intervals (t-1, t] with the row-t covariates;
// only the final interval carries the event. Columns that are constant over
// all training rows are dropped.
inline CountingProcess to_counting_process(const std::vector<EngineRun>& engines,
                                           const PreprocessOptions& options = {}) {
  std::size_t n_rows = 0;
  for (const auto& e : engines) {
    if (e.rows.empty()) throw DataError("engine " + e.key + " has no rows");
    n_rows += e.rows.size();
  }
  if (n_rows == 0) throw UsageError("no training rows");

  const auto names = raw_column_names();
  CovariateSpec spec;
  for (std::size_t c = 0; c < kRawCovariates; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (const auto& e : engines) {
      for (const auto& r : e.rows) {
        lo = std::min(lo, r.values[c]);
        hi = std::max(hi, r.values[c]);
        sum += r.values[c];
      }
    }
    if (!(hi > lo)) continue;
    const double mean = sum / static_cast<double>(n_rows);
    double ss = 0.0;
    for (const auto& e : engines) {
      for (const auto& r : e.rows) ss += (r.values[c] - mean) * (r.values[c] - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n_rows));
    if (!(sd > 0.0)) continue;
    spec.names.push_back(names[c]);
    spec.kept_columns.push_back(c);
    spec.means.push_back(mean);
    spec.scales.push_back(options.standardize ? sd : 1.0);
  }
  if (spec.kept_columns.empty()) throw DataError("no informative covariates");

  CountingProcess out;
  out.records.reserve(n_rows);
  for (const auto& e : engines) {
    for (std::size_t t = 0; t < e.rows.size(); ++t) {
      SurvivalRecord rec;
      rec.unit_key = e.key;
      rec.start = e.rows[t].cycle - 1;
      rec.stop = e.rows[t].cycle;
      rec.event = (t + 1 == e.rows.size());
      rec.covariates = spec.transform(e.rows[t]);
      out.records.push_back(std::move(rec));
    }
  }
  out.spec = std::move(spec);
  return out;
}

enum class TieMethod { efron, breslow };

inline std::string_view to_string(TieMethod m) { return m == TieMethod::efron ? "efron" : "breslow"; }

inline TieMethod parse_tie_method(std::string_view s) {
  if (s == "efron") return TieMethod::efron;
  if (s == "breslow") return TieMethod::breslow;
  throw UsageError("unknown tie method: " + std::string(s));
}

struct LikelihoodResult {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Risk sets grouped by distinct event time. The risk set at time tau holds the
// records with start < tau <= stop.
class PartialLikelihood {
 public:
  PartialLikelihood(const std::vector<SurvivalRecord>& records, TieMethod ties,
                    std::span<const std::size_t> columns = {})
      : ties_(ties) {
    const std::size_t full_d = records.empty() ? 0 : records.front().covariates.size();
    if (columns.empty()) {
      columns_.resize(full_d);
      for (std::size_t j = 0; j < full_d; ++j) columns_[j] = j;
    } else {
      columns_.assign(columns.begin(), columns.end());
    }
    const auto d = static_cast<Eigen::Index>(columns_.size());
    x_.resize(static_cast<Eigen::Index>(records.size()), d);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.covariates.size() != full_d) throw UsageError("records have inconsistent covariate lengths");
      if (!(r.start < r.stop)) throw UsageError("record " + r.unit_key + " has start >= stop");
      for (Eigen::Index j = 0; j < d; ++j) {
        x_(static_cast<Eigen::Index>(i), j) = r.covariates[columns_[static_cast<std::size_t>(j)]];
      }
    }

    std::vector<int> times;
    for (const auto& r : records) {
      if (r.event) times.push_back(r.stop);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    groups_.resize(times.size());
    for (std::size_t g = 0; g < times.size(); ++g) groups_[g].time = times[g];
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      auto it = std::upper_bound(times.begin(), times.end(), r.start);
      for (; it != times.end() && *it <= r.stop; ++it) {
        auto& grp = groups_[static_cast<std::size_t>(it - times.begin())];
        grp.at_risk.push_back(i);
        if (r.event && r.stop == *it) grp.deaths.push_back(i);
      }
    }
  }

  std::size_t dimension() const { return columns_.size(); }
  std::size_t event_times() const { return groups_.size(); }
  std::size_t events() const {
    std::size_t n = 0;
    for (const auto& g : groups_) n += g.deaths.size();
    return n;
  }
  const std::vector<int>& event_time_list() const {
    if (times_cache_.empty()) {
      for (const auto& g : groups_) times_cache_.push_back(g.time);
    }
    return times_cache_;
  }

  // True when every risk set is a single record, so the likelihood is flat.
  bool no_comparisons() const {
    return std::all_of(groups_.begin(), groups_.end(), [](const Group& g) { return g.at_risk.size() <= 1; });
  }

  LikelihoodResult evaluate(const Eigen::VectorXd& beta) const {
    const auto d = static_cast<Eigen::Index>(columns_.size());
    if (beta.size() != d) throw UsageError("beta has wrong length");
    LikelihoodResult out;
    out.gradient = Eigen::VectorXd::Zero(d);
    out.hessian = Eigen::MatrixXd::Zero(d, d);

    // Neumaier-compensated accumulation of the scalar value.
    double sum = 0.0;
    double comp = 0.0;
    auto add = [&](double v) {
      const double t = sum + v;
      if (std::abs(sum) >= std::abs(v)) {
        comp += (sum - t) + v;
      } else {
        comp += (v - t) + sum;
      }
      sum = t;
    };

    Eigen::VectorXd s1(d), d1(d), xbar(d);
    Eigen::MatrixXd s2(d, d), d2(d, d);
    std::vector<double> eta;
    for (const auto& g : groups_) {
      eta.resize(g.at_risk.size());
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < g.at_risk.size(); ++k) {
        eta[k] = x_.row(static_cast<Eigen::Index>(g.at_risk[k])).dot(beta);
        m = std::max(m, eta[k]);
      }
      double s0 = 0.0;
      double d0 = 0.0;
      s1.setZero();
      d1.setZero();
      s2.setZero();
      d2.setZero();
      std::size_t di = 0;
      for (std::size_t k = 0; k < g.at_risk.size(); ++k) {
        const auto row = x_.row(static_cast<Eigen::Index>(g.at_risk[k]));
        const double w = std::exp(eta[k] - m);
        s0 += w;
        s1.noalias() += w * row.transpose();
        s2.selfadjointView<Eigen::Lower>().rankUpdate(row.transpose(), w);
        const bool died = di < g.deaths.size() && g.deaths[di] == g.at_risk[k];
        if (died) {
          ++di;
          add(eta[k]);
          out.gradient.noalias() += row.transpose();
          if (ties_ == TieMethod::efron) {
            d0 += w;
            d1.noalias() += w * row.transpose();
            d2.selfadjointView<Eigen::Lower>().rankUpdate(row.transpose(), w);
          }
        }
      }
      const auto nd = static_cast<double>(g.deaths.size());
      for (std::size_t l = 0; l < g.deaths.size(); ++l) {
        const double frac = static_cast<double>(l) / nd;
        const double a0 = s0 - frac * d0;
        xbar = (s1 - frac * d1) / a0;
        add(-(std::log(a0) + m));
        out.gradient -= xbar;
        out.hessian.triangularView<Eigen::Lower>() -= (s2 - frac * d2) / a0;
        out.hessian.selfadjointView<Eigen::Lower>().rankUpdate(xbar, 1.0);
      }
    }
    out.hessian = out.hessian.selfadjointView<Eigen::Lower>();
    out.value = sum + comp;
    return out;
  }

  // Breslow increments d_j / sum_{risk set} exp(beta'x) at each event time.
  std::vector<double> breslow_increments(const Eigen::VectorXd& beta) const {
    std::vector<double> inc;
    inc.reserve(groups_.size());
    for (const auto& g : groups_) {
      double m = -std::numeric_limits<double>::infinity();
      std::vector<double> eta(g.at_risk.size());
      for (std::size_t k = 0; k < g.at_risk.size(); ++k) {
        eta[k] = x_.row(static_cast<Eigen::Index>(g.at_risk[k])).dot(beta);
        m = std::max(m, eta[k]);
      }
      double s0 = 0.0;
      for (double e : eta) s0 += std::exp(e - m);
      inc.push_back(static_cast<double>(g.deaths.size()) * std::exp(-m) / s0);
    }
    return inc;
  }

 private:
  struct Group {
    int time = 0;
    std::vector<std::size_t> at_risk;  // ascending record index
    std::vector<std::size_t> deaths;   // subset of at_risk, ascending
  };

  TieMethod ties_;
  std::vector<std::size_t> columns_;
  Eigen::MatrixXd x_;
  std::vector<Group> groups_;
  mutable std::vector<int> times_cache_;
};

inline LikelihoodResult log_partial_likelihood(const std::vector<SurvivalRecord>& records,
                                               const Eigen::VectorXd& beta,
                                               TieMethod ties = TieMethod::efron) {
  return PartialLikelihood(records, ties).evaluate(beta);
}

struct BaselineHazardTable {
  std::vector<int> event_times;
  std::vector<double> increments;

  std::vector<double> cumulative() const {
    std::vector<double> out(increments.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < increments.size(); ++j) out[j] = (acc += increments[j]);
    return out;
  }

  friend bool operator==(const BaselineHazardTable&, const BaselineHazardTable&) = default;
};

inline BaselineHazardTable breslow_baseline(const std::vector<SurvivalRecord>& records,
                                            const Eigen::VectorXd& beta) {
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (!std::isfinite(beta[j])) throw UsageError("breslow_baseline: beta must be finite");
  }
  PartialLikelihood lik(records, TieMethod::breslow);
  return {lik.event_time_list(), lik.breslow_increments(beta)};
}

struct FitConfig {
  double tolerance = 1e-7;
  int max_iterations = 100;
  TieMethod tie_method = TieMethod::efron;
  int max_halvings = 20;
  double separation_bound = 20.0;
  double condition_limit = 1e12;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

struct FitDiagnostics {
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;  // max-norm
  int iterations = 0;
  bool converged = false;
  std::vector<double> log_likelihood_trace;  // one entry per accepted iterate, starting at beta = 0
  std::vector<std::string> notes;
};

struct CoxModel {
  Eigen::VectorXd beta;
  CovariateSpec spec;
  BaselineHazardTable baseline;
  FitDiagnostics diagnostics;
  FitConfig fit_config;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_beta, FitDiagnostics diagnostics)
      : NumericalError(what), beta(std::move(last_beta)), diagnostics(std::move(diagnostics)) {}
  Eigen::VectorXd beta;
  FitDiagnostics diagnostics;
};

namespace detail {

inline double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline double condition_estimate(const Eigen::MatrixXd& information) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(information, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace detail

// Newton-Raphson from beta = 0. Columns whose inclusion makes the information
// matrix at beta = 0 ill-conditioned are dropped in column order, so the first
// of a set of collinear columns is kept.
inline CoxModel fit_cox(const CountingProcess& data, const FitConfig& config = {}) {
  const auto& records = data.records;
  if (std::none_of(records.begin(), records.end(), [](const SurvivalRecord& r) { return r.event; })) {
    throw UsageError("fit_cox: no events");
  }
  const std::size_t full_d = data.spec.dimension();
  if (full_d == 0) throw DataError("no informative covariates");
  if (!records.empty() && records.front().covariates.size() != full_d) {
    throw UsageError("fit_cox: covariate spec does not match records");
  }

  CoxModel model;
  model.fit_config = config;
  FitDiagnostics& diag = model.diagnostics;

  PartialLikelihood full(records, config.tie_method);
  if (full.no_comparisons()) {
    model.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full_d));
    model.spec = data.spec;
    const auto at_zero = full.evaluate(model.beta);
    diag.log_likelihood = at_zero.value;
    diag.gradient_norm = detail::max_abs(at_zero.gradient);
    diag.converged = true;
    diag.log_likelihood_trace = {at_zero.value};
    diag.notes.push_back("no comparisons: every risk set holds a single record");
    model.baseline = breslow_baseline(records, model.beta);
    return model;
  }

  const Eigen::MatrixXd info0 = -full.evaluate(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full_d))).hessian;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < full_d; ++j) {
    std::vector<std::size_t> trial = keep;
    trial.push_back(j);
    Eigen::MatrixXd sub(trial.size(), trial.size());
    for (std::size_t a = 0; a < trial.size(); ++a) {
      for (std::size_t b = 0; b < trial.size(); ++b) {
        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            info0(static_cast<Eigen::Index>(trial[a]), static_cast<Eigen::Index>(trial[b]));
      }
    }
    if (detail::condition_estimate(sub) > config.condition_limit) {
      diag.notes.push_back("dropped collinear covariate " + data.spec.names[j]);
    } else {
      keep = std::move(trial);
    }
  }
  if (keep.empty()) throw DataError("no informative covariates");

  for (auto j : keep) {
    model.spec.names.push_back(data.spec.names[j]);
    model.spec.kept_columns.push_back(data.spec.kept_columns[j]);
    model.spec.means.push_back(data.spec.means[j]);
    model.spec.scales.push_back(data.spec.scales[j]);
  }

  PartialLikelihood lik(records, config.tie_method, keep);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(keep.size()));
  LikelihoodResult cur = lik.evaluate(beta);
  diag.log_likelihood_trace.push_back(cur.value);

  auto snapshot = [&](int iterations, bool converged) {
    diag.log_likelihood = cur.value;
    diag.gradient_norm = detail::max_abs(cur.gradient);
    diag.iterations = iterations;
    diag.converged = converged;
  };

  int iter = 0;
  for (;; ++iter) {
    if (detail::max_abs(cur.gradient) <= config.tolerance) break;
    if (iter >= config.max_iterations) {
      snapshot(iter, false);
      // Still climbing with coefficients past the bound: beta is running off to infinity.
      if (detail::max_abs(beta) > config.separation_bound) throw ConvergenceError("covariate separation", beta, diag);
      throw ConvergenceError("fit_cox: no convergence after " + std::to_string(iter) + " iterations", beta,
                             diag);
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(-cur.hessian);
    Eigen::VectorXd step = solver.solve(cur.gradient);
    if (solver.info() != Eigen::Success || !step.allFinite()) {
      snapshot(iter, false);
      throw ConvergenceError("fit_cox: singular information matrix", beta, diag);
    }

    bool accepted = false;
    for (int h = 0; h <= config.max_halvings; ++h) {
      Eigen::VectorXd trial = beta + step;
      LikelihoodResult next = lik.evaluate(trial);
      if (std::isfinite(next.value) && next.value >= cur.value) {
        beta = std::move(trial);
        cur = std::move(next);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      snapshot(iter, false);
      throw ConvergenceError("fit_cox: step halving failed to increase the likelihood", beta, diag);
    }
    diag.log_likelihood_trace.push_back(cur.value);
  }
  snapshot(iter, true);

  // A monotone likelihood can flatten below the gradient tolerance before
  // beta passes the bound. At a finite maximum, pushing beta further out along
  // the full ray or any single axis cannot raise the likelihood beyond roundoff.
  if (!beta.isZero()) {
    const double slack = 1e-12 * (1.0 + std::abs(cur.value));
    auto rises = [&](const Eigen::VectorXd& probe) {
      const double v = lik.evaluate(probe).value;
      return std::isfinite(v) && v > cur.value + slack;
    };
    bool separated = rises(2.0 * beta);
    for (Eigen::Index j = 0; j < beta.size() && !separated; ++j) {
      if (beta[j] == 0.0) continue;
      Eigen::VectorXd probe = beta;
      probe[j] *= 2.0;
      separated = rises(probe);
    }
    if (separated) {
      diag.converged = false;
      throw ConvergenceError("covariate separation", beta, diag);
    }
  }
  model.beta = std::move(beta);

  // Baseline on the retained columns.
  std::vector<SurvivalRecord> reduced;
  reduced.reserve(records.size());
  for (const auto& r : records) {
    SurvivalRecord s{r.unit_key, r.start, r.stop, r.event, {}};
    s.covariates.reserve(keep.size());
    for (auto j : keep) s.covariates.push_back(r.covariates[j]);
    reduced.push_back(std::move(s));
  }
  model.baseline = breslow_baseline(reduced, model.beta);
  return model;
}

// beta' (x_kept - mean) / scale for raw kept-column values.
inline double log_partial_hazard(const CoxModel& model, std::span<const double> kept_values) {
  const auto z = model.spec.transform_kept(kept_values);
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) s += model.beta[static_cast<Eigen::Index>(j)] * z[j];
  return s;
}

inline double log_partial_hazard(const CoxModel& model, const MeasurementRow& row) {
  const auto z = model.spec.transform(row);
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) s += model.beta[static_cast<Eigen::Index>(j)] * z[j];
  return s;
}

// JSON model document.

inline nlohmann::json to_json(const CoxModel& m) {
  nlohmann::json j;
  j["beta"] = std::vector<double>(m.beta.data(), m.beta.data() + m.beta.size());
  j["covariates"] = {{"names", m.spec.names},
                     {"columns", m.spec.kept_columns},
                     {"means", m.spec.means},
                     {"scales", m.spec.scales}};
  j["baseline"] = {{"event_times", m.baseline.event_times}, {"increments", m.baseline.increments}};
  j["diagnostics"] = {{"log_likelihood", m.diagnostics.log_likelihood},
                      {"gradient_norm", m.diagnostics.gradient_norm},
                      {"iterations", m.diagnostics.iterations},
                      {"converged", m.diagnostics.converged},
                      {"log_likelihood_trace", m.diagnostics.log_likelihood_trace},
                      {"notes", m.diagnostics.notes}};
  j["fit_config"] = {{"tolerance", m.fit_config.tolerance},
                     {"max_iterations", m.fit_config.max_iterations},
                     {"tie_method", std::string(to_string(m.fit_config.tie_method))},
                     {"max_halvings", m.fit_config.max_halvings},
                     {"separation_bound", m.fit_config.separation_bound},
                     {"condition_limit", m.fit_config.condition_limit}};
  return j;
}

inline CoxModel cox_model_from_json(const nlohmann::json& j) {
  try {
    CoxModel m;
    auto beta = j.at("beta").get<std::vector<double>>();
    m.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    const auto& c = j.at("covariates");
    m.spec.names = c.at("names").get<std::vector<std::string>>();
    m.spec.kept_columns = c.at("columns").get<std::vector<std::size_t>>();
    m.spec.means = c.at("means").get<std::vector<double>>();
    m.spec.scales = c.at("scales").get<std::vector<double>>();
    const auto& b = j.at("baseline");
    m.baseline.event_times = b.at("event_times").get<std::vector<int>>();
    m.baseline.increments = b.at("increments").get<std::vector<double>>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.log_likelihood = d.at("log_likelihood").get<double>();
    m.diagnostics.gradient_norm = d.at("gradient_norm").get<double>();
    m.diagnostics.iterations = d.at("iterations").get<int>();
    m.diagnostics.converged = d.at("converged").get<bool>();
    m.diagnostics.log_likelihood_trace = d.at("log_likelihood_trace").get<std::vector<double>>();
    m.diagnostics.notes = d.at("notes").get<std::vector<std::string>>();
    const auto& f = j.at("fit_config");
    m.fit_config.tolerance = f.at("tolerance").get<double>();
    m.fit_config.max_iterations = f.at("max_iterations").get<int>();
    m.fit_config.tie_method = parse_tie_method(f.at("tie_method").get<std::string>());
    m.fit_config.max_halvings = f.at("max_halvings").get<int>();
    m.fit_config.separation_bound = f.at("separation_bound").get<double>();
    m.fit_config.condition_limit = f.at("condition_limit").get<double>();
    const auto d_model = m.spec.kept_columns.size();
    if (static_cast<std::size_t>(m.beta.size()) != d_model || m.spec.names.size() != d_model ||
        m.spec.means.size() != d_model || m.spec.scales.size() != d_model) {
      throw DataError("model document: inconsistent covariate lengths");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model document: ") + e.what());
  }
}

}  // namespace pdm
