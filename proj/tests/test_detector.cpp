#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "causal_cpd/detector.hpp"
#include "causal_cpd/parallel.hpp"
#include "causal_cpd/rng.hpp"
#include "causal_cpd/scm_gen.hpp"
#include "test_support.hpp"

using namespace ccpd;

namespace {

PeSeries series_of(std::vector<double> scores) {
  PeSeries s;
  s.scores = std::move(scores);
  s.spans.resize(s.scores.size());
  return s;
}

ScmSpec null_spec(std::uint64_t seed) {
  GeneratorOptions g;
  g.seed = seed;
  ScmSpec spec = random_spec(g);
  for (auto& r : spec.regimes) r[1] = r[0];
  return spec;
}

bool same_detection(const DetectionReport& a, const DetectionReport& b) {
  if (a.components.size() != b.components.size() || a.spa_hat != b.spa_hat) return false;
  for (std::size_t j = 0; j < a.components.size(); ++j) {
    const auto& x = a.components[j];
    const auto& y = b.components[j];
    if (x.spa != y.spa || x.detected != y.detected || x.winning_config != y.winning_config ||
        x.window_index != y.window_index || x.projected_time != y.projected_time || x.peak_score != y.peak_score ||
        x.series.size() != y.series.size())
      return false;
    for (const auto& [k, s] : x.series)
      if (y.series.at(k).scores != s.scores) return false;
  }
  return true;
}

}  // namespace

TEST(Argmax, TiesGoToTheSmallerConfigThenWindow) {
  std::map<int, PeSeries> m;
  m[2] = series_of({0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.3});
  m[5] = series_of({0.0, 0.3});
  const ArgmaxResult r = argmax_with_ties(m);
  EXPECT_EQ(r.config_index, 2);
  EXPECT_EQ(r.window_index, 7);
  EXPECT_EQ(r.score, 0.3);
}

TEST(Argmax, OnlyStrictlyLargerScoresWin) {
  std::map<int, PeSeries> m;
  m[0] = series_of({0.1, 0.2, 0.3, 0.3});
  EXPECT_EQ(argmax_with_ties(m).window_index, 2);
  m[0] = series_of({0.1, 0.2, 0.3, 0.30000001});
  EXPECT_EQ(argmax_with_ties(m).window_index, 3);
}

TEST(Argmax, AllZeroPicksTheFirstWindow) {
  std::map<int, PeSeries> m;
  m[1] = series_of({0.0, 0.0});
  m[3] = series_of({0.0});
  const ArgmaxResult r = argmax_with_ties(m);
  EXPECT_EQ(r.config_index, 1);
  EXPECT_EQ(r.window_index, 0);
  EXPECT_EQ(r.score, 0.0);
}

TEST(Argmax, NanIsIgnoredAndEmptyThrows) {
  std::map<int, PeSeries> m;
  m[0] = series_of({std::nan(""), 0.1});
  EXPECT_EQ(argmax_with_ties(m).window_index, 1);
  std::map<int, PeSeries> empty;
  empty[0] = series_of({});
  EXPECT_THROW(argmax_with_ties(empty), std::invalid_argument);
}

TEST(Detector, ConstantComponentIsNotSignificant) {
  Rng rng(1);
  std::vector<int> coins(400);
  for (auto& v : coins) v = static_cast<int>(rng.uniform_index(2));
  const Dataset ds = fixtures::dataset_from_rows({std::vector<int>(400, 0), coins});
  DetectorConfig cfg;
  const DetectionReport r = detect_with_parents(ds, {LaggedParentSet{{0, 1}}, LaggedParentSet{{1, 1}}}, cfg);
  const auto& c = r.components[0];
  ASSERT_TRUE(c.detected);
  EXPECT_EQ(c.winning_config, 0);
  EXPECT_EQ(c.window_index, 0);
  EXPECT_EQ(c.peak_score, 0.0);
  EXPECT_FALSE(c.significant);
  ASSERT_EQ(c.skipped.size(), 1u);
  EXPECT_EQ(c.skipped[0].config_index, 1);
}

TEST(Detector, ProjectsToTheMidpointOfTheWindowBoundary) {
  // X2 is 1 only at t = 2999..3002, so times 3000..3003 leave segment 0 of
  // X1 and its samples at 2999 and 3004 become neighbors. X1 switches from 0
  // to 1 at t = 3004.
  const int length = 6000;
  std::vector<int> x1(length, 0), x2(length, 0);
  for (int t = 3004; t < length; ++t) x1[static_cast<std::size_t>(t)] = 1;
  for (int t = 2999; t <= 3002; ++t) x2[static_cast<std::size_t>(t)] = 1;
  const Dataset ds = fixtures::dataset_from_rows({x1, x2});
  DetectorConfig cfg;
  const DetectionReport r = detect_with_parents(ds, {LaggedParentSet{{1, 1}}, LaggedParentSet{{1, 1}}}, cfg);
  const auto& c = r.components[0];
  ASSERT_TRUE(c.detected);
  EXPECT_EQ(c.winning_config, 0);
  EXPECT_EQ(c.t_before, 2999);
  EXPECT_EQ(c.t_after, 3004);
  EXPECT_DOUBLE_EQ(c.projected_time, 3001.5);
  EXPECT_EQ(c.change_position, 2999);
  EXPECT_EQ(c.window_index, 2999 - 50);
}

TEST(Detector, OracleParentsLocateASoftChange) {
  int close = 0;
  const int trials = 10;
  for (int k = 0; k < trials; ++k) {
    GeneratorOptions g;
    g.seed = 40 + static_cast<std::uint64_t>(k);
    const ScmSpec spec = random_spec(g);
    const Simulation sim = simulate(spec);
    DetectorConfig cfg;
    const DetectionReport r = detect_with_parents(sim.data, sim.truth.union_parents, cfg);
    EXPECT_TRUE(r.oracle_parents);
    for (int j = 0; j < spec.n; ++j) {
      const auto& c = r.components[static_cast<std::size_t>(j)];
      ASSERT_TRUE(c.detected);
      close += std::abs(c.projected_time - spec.change_points[static_cast<std::size_t>(j)]) <= 100.0;
    }
  }
  EXPECT_GE(close, static_cast<int>(0.8 * trials * 3));
}

TEST(Detector, ProjectionStaysInsideTheWinningSegment) {
  GeneratorOptions g;
  g.seed = 60;
  const ScmSpec spec = random_spec(g);
  const Simulation sim = simulate(spec);
  DetectorConfig cfg;
  const DetectionReport r = detect(sim.data, cfg);
  for (const auto& c : r.components) {
    ASSERT_TRUE(c.detected);
    const auto& s = c.series.at(c.winning_config);
    const auto& span = s.spans[static_cast<std::size_t>(c.window_index)];
    EXPECT_EQ(span.first_end, c.t_before);
    EXPECT_EQ(span.second_begin, c.t_after);
    EXPECT_LT(c.t_before, c.projected_time);
    EXPECT_LT(c.projected_time, c.t_after);
    EXPECT_GT(c.projected_time, cfg.discovery.tau_ub);
    EXPECT_LT(c.projected_time, spec.length);
    double best = 0.0;
    for (const auto& [_, series] : c.series)
      for (double v : series.scores) best = std::max(best, v);
    EXPECT_EQ(c.peak_score, best);
  }
}

TEST(Detector, PreChangeWindowsScoreBelowStraddlingOnes) {
  int wins = 0;
  const int trials = 20;
  int total = 0;
  for (int k = 0; k < trials; ++k) {
    GeneratorOptions g;
    g.seed = 200 + static_cast<std::uint64_t>(k);
    const ScmSpec spec = random_spec(g);
    const Simulation sim = simulate(spec);
    DetectorConfig cfg;
    const DetectionReport r = detect_with_parents(sim.data, sim.truth.union_parents, cfg);
    for (int j = 0; j < spec.n; ++j) {
      const int cp = spec.change_points[static_cast<std::size_t>(j)];
      double pre = 0.0, straddle = 0.0;
      for (const auto& [_, s] : r.components[static_cast<std::size_t>(j)].series)
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (s.spans[i].second_end < cp) pre = std::max(pre, s.scores[i]);
          if (s.spans[i].first_end < cp && s.spans[i].second_begin >= cp) straddle = std::max(straddle, s.scores[i]);
        }
      wins += pre < straddle;
      ++total;
    }
  }
  EXPECT_GE(wins, static_cast<int>(0.95 * total)) << wins << " of " << total;
}

TEST(Detector, NoChangeIsFlaggedUnderAThreshold) {
  // Threshold from the 99th percentile of null peaks on independent seeds.
  std::vector<double> peaks;
  DetectorConfig cfg;
  for (std::uint64_t seed = 300; seed < 400; ++seed) {
    const Simulation sim = simulate(null_spec(seed));
    for (const auto& c : detect_with_parents(sim.data, sim.truth.union_parents, cfg).components)
      peaks.push_back(c.peak_score);
  }
  std::sort(peaks.begin(), peaks.end());
  const double threshold = peaks[static_cast<std::size_t>(0.99 * static_cast<double>(peaks.size() - 1))];
  EXPECT_LT(threshold, 0.1);

  cfg.score_threshold = threshold;
  int flagged = 0, total = 0;
  for (std::uint64_t seed = 400; seed < 420; ++seed) {
    const Simulation sim = simulate(null_spec(seed));
    for (const auto& c : detect_with_parents(sim.data, sim.truth.union_parents, cfg).components) {
      EXPECT_LT(c.peak_score, 0.1);
      flagged += !c.significant;
      ++total;
    }
  }
  EXPECT_GE(flagged, static_cast<int>(0.9 * total)) << flagged << " of " << total;
}

TEST(Detector, DeterministicAcrossThreadCounts) {
  GeneratorOptions g;
  g.seed = 70;
  const Dataset ds = simulate(random_spec(g)).data;
  DetectorConfig cfg;
  cfg.refine = true;
  set_thread_count(1);
  const DetectionReport one = detect(ds, cfg);
  set_thread_count(4);
  const DetectionReport four = detect(ds, cfg);
  set_thread_count(0);
  EXPECT_TRUE(same_detection(one, four));
  EXPECT_TRUE(same_detection(one, detect(ds, cfg)));
  for (std::size_t j = 0; j < one.components.size(); ++j) {
    EXPECT_EQ(one.components[j].parents_pre, four.components[j].parents_pre);
    ASSERT_TRUE(one.components[j].parents_pre.has_value());
    EXPECT_TRUE(one.components[j].parents_pre->is_subset_of(one.spa_hat[j]));
    EXPECT_TRUE(one.components[j].parents_post->is_subset_of(one.spa_hat[j]));
  }
}

TEST(Detector, EmptyDiscoveryFallsBackToTheSelfLag) {
  Rng rng(2);
  std::vector<std::vector<int>> rows(2, std::vector<int>(3000));
  for (auto& row : rows)
    for (auto& v : row) v = static_cast<int>(rng.uniform_index(2));
  const Dataset ds = fixtures::dataset_from_rows(rows);
  DetectorConfig cfg;
  cfg.discovery.alpha_level = 1e-6;
  const DetectionReport r = detect(ds, cfg);
  for (int j = 0; j < 2; ++j) {
    const auto& c = r.components[static_cast<std::size_t>(j)];
    EXPECT_TRUE(c.spa_fallback);
    EXPECT_EQ(c.spa, (LaggedParentSet{{j, 1}}));
    EXPECT_TRUE(c.detected);
  }
}

TEST(Detector, AllSegmentsTooShortMeansNoDetection) {
  Rng rng(3);
  std::vector<int> row(300);
  for (auto& v : row) v = static_cast<int>(rng.uniform_index(2));
  const Dataset ds = fixtures::dataset_from_rows({row});
  DetectorConfig cfg;
  cfg.pe.n_w = 100;
  const DetectionReport r = detect_with_parents(ds, {LaggedParentSet{{0, 1}}}, cfg);
  const auto& c = r.components[0];
  EXPECT_FALSE(c.detected);
  EXPECT_FALSE(c.no_detection_reason.empty());
  EXPECT_EQ(c.skipped.size(), 2u);
}

TEST(Detector, SegmentParentBudget) {
  DetectorConfig cfg;
  EXPECT_EQ(cfg.resolved_segment_parents(6000, 2), 3);
  EXPECT_EQ(cfg.resolved_segment_parents(2000, 2), 2);
  EXPECT_EQ(cfg.resolved_segment_parents(300, 2), 1);
  cfg.max_segment_parents = 0;
  EXPECT_EQ(cfg.resolved_segment_parents(6000, 2), 0);
  cfg.max_segment_parents = 2;
  EXPECT_EQ(cfg.resolved_segment_parents(6000, 2), 2);
}

TEST(Detector, CapKeepsTheStrongestDiscoveredParents) {
  GeneratorOptions g;
  g.seed = 80;
  const Dataset ds = simulate(random_spec(g)).data;
  DetectorConfig cfg;
  cfg.max_segment_parents = 1;
  const DetectionReport r = detect(ds, cfg);
  for (std::size_t j = 0; j < r.components.size(); ++j) {
    const auto& c = r.components[j];
    EXPECT_LE(c.spa.size(), 1u);
    EXPECT_TRUE(c.spa.is_subset_of(c.spa_discovered) || c.spa_fallback);
    EXPECT_EQ(c.spa_capped, c.spa_discovered.size() > 1);
    EXPECT_EQ(r.spa_hat[j], c.spa_discovered);
  }
}

TEST(DetectorConfig, Validation) {
  DetectorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.min_segment_length = 2 * cfg.pe.n_w;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = DetectorConfig{};
  cfg.max_segment_parents = -2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
