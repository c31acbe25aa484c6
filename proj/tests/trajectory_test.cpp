#include <gtest/gtest.h>

#include "pdm/trajectory.hpp"
#include "test_fixtures.hpp"

using namespace pdm;
using pdm::testing::small_fleet;

namespace {

std::vector<double> brute_force_average(const std::vector<double>& raw, int w) {
  std::vector<double> out;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const std::size_t first = t + 1 >= static_cast<std::size_t>(w) ? t + 1 - w : 0;
    double s = 0.0;
    for (std::size_t k = first; k <= t; ++k) s += raw[k];
    out.push_back(s / static_cast<double>(t + 1 - first));
  }
  return out;
}

}  // namespace

TEST(Smoothing, PrefixAverage) {
  const std::vector<double> raw{1.0, 2.0, 3.0};
  EXPECT_EQ(causal_moving_average(raw, 3), (std::vector<double>{1.0, 1.5, 2.0}));
  EXPECT_EQ(causal_moving_average(raw, 1), raw);
  EXPECT_THROW(causal_moving_average(raw, 0), UsageError);
}

TEST(Smoothing, MatchesBruteForceAndBoundedByRawMax) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> raw(1 + rng.below(40));
    for (auto& v : raw) v = 5.0 * rng.normal();
    const double raw_max = *std::max_element(raw.begin(), raw.end());
    for (int w = 1; w <= 12; ++w) {
      const auto s = causal_moving_average(raw, w);
      const auto b = brute_force_average(raw, w);
      for (std::size_t t = 0; t < raw.size(); ++t) EXPECT_NEAR(s[t], b[t], 1e-12);
      const auto tr = make_trajectory("u", raw, {w});
      EXPECT_LE(tr.max_score, raw_max);
    }
  }
}

TEST(Smoothing, ShiftEquivariant) {
  Rng rng(4);
  std::vector<double> raw(30);
  for (auto& v : raw) v = rng.normal();
  std::vector<double> shifted = raw;
  for (auto& v : shifted) v += 4.25;
  for (int w : {1, 2, 5, 9}) {
    const auto a = causal_moving_average(raw, w);
    const auto b = causal_moving_average(shifted, w);
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_NEAR(b[t], a[t] + 4.25, 1e-12);
  }
}

TEST(ScoreEngine, WindowOneEqualsRawScores) {
  const auto fleet = small_fleet(12, 5);
  const auto model = fit_cox(to_counting_process(fleet));
  const auto tr = score_engine(model, fleet[3]);
  ASSERT_EQ(tr.scores.size(), fleet[3].rows.size());
  EXPECT_EQ(tr.failure_cycle, fleet[3].failure_cycle);
  for (std::size_t t = 0; t < tr.scores.size(); ++t) {
    EXPECT_EQ(tr.scores[t], log_partial_hazard(model, fleet[3].rows[t]));
  }
  EXPECT_EQ(tr.max_score, *std::max_element(tr.scores.begin(), tr.scores.end()));
}

TEST(ScoreEngine, Causality) {
  const auto fleet = small_fleet(12, 6);
  const auto model = fit_cox(to_counting_process(fleet));
  for (int w : {1, 3}) {
    const auto full = score_engine(model, fleet[0], {w});
    for (std::size_t cut = 1; cut <= fleet[0].rows.size(); ++cut) {
      EngineRun prefix = fleet[0];
      prefix.rows.resize(cut);
      prefix.failure_cycle = static_cast<int>(cut);
      const auto part = score_engine(model, prefix, {w});
      for (std::size_t t = 0; t < cut; ++t) EXPECT_EQ(part.scores[t], full.scores[t]);
    }
  }
}

TEST(ScoreDataset, OrderAndShape) {
  const auto fleet = small_fleet(3, 7);
  const auto model = fit_cox(to_counting_process(small_fleet(15, 8)));
  const auto ds = make_dataset(SubsetLabel::FD001, fleet);
  const auto trs = score_dataset(model, ds);
  ASSERT_EQ(trs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(trs[i].unit_key, ds.engines[i].key);
    EXPECT_EQ(trs[i].failure_cycle, ds.engines[i].failure_cycle);
  }
  EXPECT_TRUE(score_dataset(model, Dataset{SubsetLabel::FD001, {}}).empty());
}

TEST(ScoreDataset, IncompatibleModelNamesTheEngine) {
  const auto ds = make_dataset(SubsetLabel::FD002, small_fleet(2, 9));
  auto model = fit_cox(to_counting_process(small_fleet(15, 8)));
  model.spec.kept_columns.push_back(99);
  model.spec.means.push_back(0.0);
  model.spec.scales.push_back(1.0);
  try {
    score_dataset(model, ds);
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("FD002-1"), std::string::npos);
  }
}

TEST(Export, CsvShapes) {
  const auto tr = make_trajectory("FD001-1", std::vector<double>{0.5, 1.5});
  EXPECT_EQ(trajectories_csv({tr}), "unit,cycle,score\nFD001-1,1,0.5\nFD001-1,2,1.5\n");
  EXPECT_EQ(trajectory_summary_csv({tr}), "unit,max_score,failure_cycle\nFD001-1,1.5,2\n");
}
