#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "pdm/cox.hpp"
#include "pdm/trajectory.hpp"
#include "test_fixtures.hpp"

using namespace pdm;
using pdm::testing::random_records;
using pdm::testing::small_fleet;
using pdm::testing::three_subjects;

namespace {

// Textbook partial likelihood, written from the definition with no
// stabilization or shared code with the implementation.
double oracle_log_likelihood(const std::vector<SurvivalRecord>& recs, const std::vector<double>& beta,
                             bool efron) {
  auto score = [&](const SurvivalRecord& r) {
    double s = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) s += beta[j] * r.covariates[j];
    return s;
  };
  std::vector<int> times;
  for (const auto& r : recs) {
    if (r.event) times.push_back(r.stop);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  double ll = 0.0;
  for (int tau : times) {
    double risk = 0.0;
    double dead = 0.0;
    int nd = 0;
    for (const auto& r : recs) {
      if (r.start < tau && tau <= r.stop) {
        risk += std::exp(score(r));
        if (r.event && r.stop == tau) {
          dead += std::exp(score(r));
          ll += score(r);
          ++nd;
        }
      }
    }
    for (int l = 0; l < nd; ++l) {
      const double frac = efron ? static_cast<double>(l) / nd : 0.0;
      ll -= std::log(risk - frac * dead);
    }
  }
  return ll;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST(CountingProcess, OneEngineThreeCycles) {
  EngineRun e;
  e.key = "FD001-1";
  e.unit_id = 1;
  for (int t = 1; t <= 3; ++t) {
    MeasurementRow r;
    r.unit_id = 1;
    r.cycle = t;
    r.values[4] = t;  // one varying column
    e.rows.push_back(r);
  }
  e.failure_cycle = 3;
  const auto cp = to_counting_process({e});
  ASSERT_EQ(cp.records.size(), 3u);
  EXPECT_EQ(cp.records[0].start, 0);
  EXPECT_EQ(cp.records[0].stop, 1);
  EXPECT_FALSE(cp.records[0].event);
  EXPECT_EQ(cp.records[1].start, 1);
  EXPECT_EQ(cp.records[1].stop, 2);
  EXPECT_FALSE(cp.records[1].event);
  EXPECT_EQ(cp.records[2].start, 2);
  EXPECT_EQ(cp.records[2].stop, 3);
  EXPECT_TRUE(cp.records[2].event);
  ASSERT_EQ(cp.spec.dimension(), 1u);
  EXPECT_EQ(cp.spec.names[0], "s2");
  EXPECT_DOUBLE_EQ(cp.spec.means[0], 2.0);
}

TEST(CountingProcess, ConstantColumnsDropped) {
  const auto fleet = small_fleet(5, 3);
  const auto cp = to_counting_process(fleet);
  EXPECT_EQ(cp.spec.kept_columns, (std::vector<std::size_t>{4, 5}));
  const auto mask = cp.spec.kept_mask();
  EXPECT_EQ(std::count(mask.begin(), mask.end(), true), 2);
  // Standardized: centered with unit population variance.
  for (std::size_t j = 0; j < 2; ++j) {
    double s = 0.0, ss = 0.0;
    for (const auto& r : cp.records) s += r.covariates[j];
    const double mean = s / static_cast<double>(cp.records.size());
    for (const auto& r : cp.records) ss += (r.covariates[j] - mean) * (r.covariates[j] - mean);
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(ss / static_cast<double>(cp.records.size()), 1.0, 1e-12);
  }
}

TEST(CountingProcess, AllConstantIsAnError) {
  auto fleet = small_fleet(2, 1);
  for (auto& e : fleet) {
    for (auto& r : e.rows) r.values[4] = r.values[5] = 1.0;
  }
  EXPECT_THROW(to_counting_process(fleet), DataError);
}

TEST(CountingProcess, StandardizationOffKeepsUnitScales) {
  const auto cp = to_counting_process(small_fleet(4, 2), {.standardize = false});
  EXPECT_EQ(cp.spec.scales, (std::vector<double>{1.0, 1.0}));
}

TEST(PartialLikelihood, ThreeSubjectsAtZero) {
  const auto res = log_partial_likelihood(three_subjects(), Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(res.value, -(std::log(3.0) + std::log(2.0)), 1e-15);
  // sum over events of (x_event - risk-set mean): (0 - 1/3) + (1 - 1/2) + (0 - 0)
  EXPECT_NEAR(res.gradient[0], 1.0 / 6.0, 1e-15);
}

TEST(PartialLikelihood, GradientAtZeroIsObservedMinusRiskMean) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto recs = random_records(rng, 15, 3);
    const auto res = log_partial_likelihood(recs, Eigen::VectorXd::Zero(3), TieMethod::breslow);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(3);
    for (const auto& ev : recs) {
      if (!ev.event) continue;
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
      int count = 0;
      for (const auto& r : recs) {
        if (r.start < ev.stop && ev.stop <= r.stop) {
          mean += to_eigen(r.covariates);
          ++count;
        }
      }
      expect += to_eigen(ev.covariates) - mean / count;
    }
    EXPECT_LT((res.gradient - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PartialLikelihood, StationaryAtLogRootTwo) {
  const auto res = log_partial_likelihood(three_subjects(), Eigen::VectorXd::Constant(1, std::log(std::sqrt(2.0))));
  EXPECT_LT(std::abs(res.gradient[0]), 1e-8);
  EXPECT_LT(res.hessian(0, 0), 0.0);
}

TEST(PartialLikelihood, MatchesDefinitionOnRandomData) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng.below(4);
    const auto recs = random_records(rng, 3 + rng.below(18), d);
    std::vector<double> beta(d);
    for (auto& b : beta) b = rng.normal();
    for (bool efron : {true, false}) {
      const auto res = log_partial_likelihood(recs, to_eigen(beta), efron ? TieMethod::efron : TieMethod::breslow);
      EXPECT_LT(rel_err(res.value, oracle_log_likelihood(recs, beta, efron)), 1e-12);
    }
  }
}

TEST(PartialLikelihood, DerivativesMatchFiniteDifferences) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.below(4);
    const auto recs = random_records(rng, 2 + rng.below(19), d);
    Eigen::VectorXd beta(d);
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta[j] = 0.7 * rng.normal();
    for (auto ties : {TieMethod::efron, TieMethod::breslow}) {
      PartialLikelihood lik(recs, ties);
      const auto res = lik.evaluate(beta);
      const double h = 1e-5;
      for (Eigen::Index j = 0; j < beta.size(); ++j) {
        Eigen::VectorXd up = beta, dn = beta;
        up[j] += h;
        dn[j] -= h;
        const auto fu = lik.evaluate(up);
        const auto fd = lik.evaluate(dn);
        const double g_fd = (fu.value - fd.value) / (2 * h);
        EXPECT_LT(std::abs(g_fd - res.gradient[j]) / std::max(1.0, std::abs(res.gradient[j])), 1e-6);
        for (Eigen::Index k = 0; k < beta.size(); ++k) {
          const double h_fd = (fu.gradient[k] - fd.gradient[k]) / (2 * h);
          EXPECT_LT(std::abs(h_fd - res.hessian(k, j)) / std::max(1.0, std::abs(res.hessian(k, j))), 1e-4);
        }
      }
      // Negative semidefinite.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(res.hessian);
      EXPECT_LE(eig.eigenvalues().maxCoeff(), 1e-10);
    }
  }
}

TEST(PartialLikelihood, LargeScoresDoNotOverflow) {
  auto recs = three_subjects();
  for (auto& r : recs) r.covariates[0] += 800.0;
  const auto res = log_partial_likelihood(recs, Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_TRUE(std::isfinite(res.value));
  EXPECT_TRUE(res.gradient.allFinite());
  EXPECT_TRUE(res.hessian.allFinite());
}

TEST(FitCox, ThreeSubjectsMatchesGridSearch) {
  // Oracle: maximize the textbook likelihood over a fine grid, then refine.
  const auto recs = three_subjects();
  double best_b = 0.0, best_v = -1e300;
  for (int i = -20000; i <= 20000; ++i) {
    const double b = i * 1e-4;
    const double v = oracle_log_likelihood(recs, {b}, true);
    if (v > best_v) {
      best_v = v;
      best_b = b;
    }
  }
  EXPECT_NEAR(best_b, 0.34657, 1e-4);  // frozen: ln(sqrt(2)) = 0.346573590...

  const auto model = fit_cox(CountingProcess::from_records(recs));
  EXPECT_NEAR(model.beta[0], best_b, 1e-4);
  EXPECT_NEAR(model.beta[0], std::log(std::sqrt(2.0)), 1e-6);
  EXPECT_TRUE(model.diagnostics.converged);
  EXPECT_LE(model.diagnostics.gradient_norm, 1e-7);
}

TEST(FitCox, AscentIsMonotone) {
  const auto model = fit_cox(to_counting_process(small_fleet(30, 8)));
  const auto& trace = model.diagnostics.log_likelihood_trace;
  ASSERT_GE(trace.size(), 2u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1]);
  EXPECT_EQ(trace.size(), static_cast<std::size_t>(model.diagnostics.iterations) + 1);
}

TEST(FitCox, SingleSubjectHasNoComparisons) {
  auto fleet = small_fleet(1, 4);
  const auto model = fit_cox(to_counting_process(fleet));
  EXPECT_TRUE(model.beta.isZero());
  ASSERT_FALSE(model.diagnostics.notes.empty());
  EXPECT_NE(model.diagnostics.notes[0].find("no comparisons"), std::string::npos);
}

TEST(FitCox, DuplicateCovariateIsDropped) {
  Rng rng(21);
  std::vector<SurvivalRecord> single, doubled;
  for (int i = 0; i < 20; ++i) {
    const double x = rng.normal();
    const int stop = 1 + static_cast<int>(rng.below(8));
    const bool event = rng.uniform() < 0.8;
    single.push_back({std::to_string(i), 0, stop, event, {x}});
    doubled.push_back({std::to_string(i), 0, stop, event, {x, 2.0 * x - 1.0}});
  }
  // Center the pair the way preprocessing would; 2x-1 is then exactly 2x.
  double m0 = 0, m1 = 0;
  for (const auto& r : doubled) {
    m0 += r.covariates[0] / 20;
    m1 += r.covariates[1] / 20;
  }
  for (auto& r : doubled) {
    r.covariates[0] -= m0;
    r.covariates[1] -= m1;
  }
  for (auto& r : single) r.covariates[0] -= m0;

  const auto a = fit_cox(CountingProcess::from_records(single));
  const auto b = fit_cox(CountingProcess::from_records(doubled));
  ASSERT_EQ(b.beta.size(), 1);
  EXPECT_EQ(b.spec.names, (std::vector<std::string>{"x1"}));
  EXPECT_NEAR(a.beta[0], b.beta[0], 1e-8);
  ASSERT_FALSE(b.diagnostics.notes.empty());
  EXPECT_NE(b.diagnostics.notes[0].find("x2"), std::string::npos);
}

TEST(FitCox, SeparationIsReported) {
  // The subject dying at time i always has the largest x in its risk set.
  std::vector<SurvivalRecord> recs;
  for (int i = 1; i <= 6; ++i) recs.push_back({std::to_string(i), 0, i, true, {-static_cast<double>(i)}});
  try {
    fit_cox(CountingProcess::from_records(recs));
    FAIL() << "expected separation";
  } catch (const ConvergenceError& e) {
    EXPECT_STREQ(e.what(), "covariate separation");
    EXPECT_GT(e.beta[0], 10.0);
  }
}

TEST(FitCox, IterationLimitCarriesLastIterate) {
  FitConfig cfg;
  cfg.max_iterations = 1;
  try {
    fit_cox(to_counting_process(small_fleet(30, 9)), cfg);
    FAIL() << "expected non-convergence";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.beta.size(), 2);
    EXPECT_FALSE(e.diagnostics.converged);
    EXPECT_EQ(e.diagnostics.iterations, 1);
  }
}

TEST(FitCox, NoEventsIsUsageError) {
  std::vector<SurvivalRecord> recs{{"a", 0, 1, false, {1.0}}, {"b", 0, 2, false, {0.0}}};
  EXPECT_THROW(fit_cox(CountingProcess::from_records(recs)), UsageError);
}

TEST(FitCox, CenteringInvariance) {
  const auto fleet = small_fleet(25, 31);
  auto shifted = fleet;
  for (auto& e : shifted) {
    for (auto& r : e.rows) {
      r.values[4] += 123.0;
      r.values[5] -= 77.0;
    }
  }
  for (bool standardize : {true, false}) {
    const auto a = fit_cox(to_counting_process(fleet, {standardize}));
    const auto b = fit_cox(to_counting_process(shifted, {standardize}));
    EXPECT_LT((a.beta - b.beta).cwiseAbs().maxCoeff(), 1e-8);
    for (std::size_t u = 0; u < fleet.size(); ++u) {
      for (std::size_t t = 0; t < fleet[u].rows.size(); ++t) {
        EXPECT_NEAR(log_partial_hazard(a, fleet[u].rows[t]), log_partial_hazard(b, shifted[u].rows[t]), 1e-8);
      }
    }
  }
}

TEST(FitCox, ScaleEquivariance) {
  const auto fleet = small_fleet(25, 32);
  auto scaled = fleet;
  const double c = 7.5;
  for (auto& e : scaled) {
    for (auto& r : e.rows) r.values[5] *= c;
  }
  const auto a = fit_cox(to_counting_process(fleet, {.standardize = false}));
  const auto b = fit_cox(to_counting_process(scaled, {.standardize = false}));
  EXPECT_NEAR(b.beta[0], a.beta[0], 1e-8);
  EXPECT_NEAR(b.beta[1], a.beta[1] / c, 1e-8);
  for (std::size_t u = 0; u < fleet.size(); ++u) {
    for (std::size_t t = 0; t < fleet[u].rows.size(); ++t) {
      EXPECT_NEAR(log_partial_hazard(a, fleet[u].rows[t]), log_partial_hazard(b, scaled[u].rows[t]), 1e-8);
    }
  }
}

TEST(Breslow, ThreeSubjects) {
  const auto recs = three_subjects();
  const auto at0 = breslow_baseline(recs, Eigen::VectorXd::Zero(1));
  EXPECT_EQ(at0.event_times, (std::vector<int>{1, 2, 3}));
  EXPECT_NEAR(at0.increments[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(at0.increments[1], 1.0 / 2.0, 1e-15);
  EXPECT_NEAR(at0.increments[2], 1.0, 1e-15);

  const double r2 = std::sqrt(2.0);
  const auto at = breslow_baseline(recs, Eigen::VectorXd::Constant(1, std::log(r2)));
  EXPECT_NEAR(at.increments[0], 1.0 / (2.0 + r2), 1e-14);
  EXPECT_NEAR(at.increments[1], 1.0 / (1.0 + r2), 1e-14);
  EXPECT_NEAR(at.increments[2], 1.0, 1e-14);
}

TEST(Breslow, FittedIncrementsPositiveAndCumulativeMonotone) {
  const auto model = fit_cox(to_counting_process(small_fleet(40, 12)));
  ASSERT_FALSE(model.baseline.increments.empty());
  for (double inc : model.baseline.increments) EXPECT_GT(inc, 0.0);
  const auto cum = model.baseline.cumulative();
  for (std::size_t i = 1; i < cum.size(); ++i) EXPECT_GE(cum[i], cum[i - 1]);
  EXPECT_TRUE(std::is_sorted(model.baseline.event_times.begin(), model.baseline.event_times.end()));
}

TEST(LogPartialHazard, Examples) {
  CoxModel m;
  m.spec = CovariateSpec::identity(2);
  m.spec.means = {1.0, 1.0};
  m.beta = Eigen::Vector2d(2.0, -1.0);
  const std::vector<double> x{2.0, 1.0};
  EXPECT_DOUBLE_EQ(log_partial_hazard(m, x), 2.0);
  EXPECT_DOUBLE_EQ(log_partial_hazard(m, m.spec.means), 0.0);
  m.beta.setZero();
  EXPECT_DOUBLE_EQ(log_partial_hazard(m, x), 0.0);
  const std::vector<double> wrong{1.0};
  EXPECT_THROW(log_partial_hazard(m, wrong), UsageError);
}

TEST(LogPartialHazard, RankingIgnoresBaseline) {
  const auto fleet = small_fleet(20, 41);
  auto model = fit_cox(to_counting_process(fleet));
  std::vector<double> before;
  for (const auto& e : fleet) before.push_back(score_engine(model, e).max_score);
  for (auto& inc : model.baseline.increments) inc = std::exp(inc) * 3.0;
  for (std::size_t i = 0; i < fleet.size(); ++i) EXPECT_EQ(score_engine(model, fleet[i]).max_score, before[i]);
}

TEST(ModelJson, RoundTripIsExact) {
  const auto model = fit_cox(to_counting_process(small_fleet(15, 51)));
  const std::string text = to_json(model).dump();
  const auto back = cox_model_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.beta, model.beta);
  EXPECT_EQ(back.spec, model.spec);
  EXPECT_EQ(back.baseline, model.baseline);
  EXPECT_EQ(back.fit_config, model.fit_config);
  EXPECT_EQ(back.diagnostics.log_likelihood, model.diagnostics.log_likelihood);
  EXPECT_EQ(to_json(back).dump(), text);
}

TEST(ModelJson, MissingFieldIsDataError) {
  auto j = to_json(fit_cox(to_counting_process(small_fleet(10, 52))));
  j.erase("beta");
  EXPECT_THROW(cox_model_from_json(j), DataError);
}
