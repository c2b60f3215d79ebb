#include <gtest/gtest.h>

#include <fstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "causal_cpd/error.hpp"
#include "causal_cpd/rng.hpp"
#include "causal_cpd/scm_gen.hpp"
#include "causal_cpd/segments.hpp"
#include "test_support.hpp"

using namespace ccpd;

namespace {

Dataset coin_flips(int n, int length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(length)));
  for (auto& row : rows)
    for (auto& v : row) v = static_cast<int>(rng.uniform_index(2));
  return fixtures::dataset_from_rows(rows);
}

}  // namespace

TEST(ConfigMatrix, OdometerOrderWithTheLastParentFastest) {
  const ConfigMatrix m = ConfigMatrix::build(LaggedParentSet{{0, 1}, {1, 2}}, 3);
  ASSERT_EQ(m.count(), 9);
  EXPECT_EQ(m.rows.row(0), Eigen::RowVector2i(0, 0));
  EXPECT_EQ(m.rows.row(1), Eigen::RowVector2i(0, 1));
  EXPECT_EQ(m.rows.row(3), Eigen::RowVector2i(1, 0));
  EXPECT_EQ(m.rows.row(8), Eigen::RowVector2i(2, 2));
}

TEST(ConfigMatrix, CountIsCapped) {
  EXPECT_EQ(configuration_count(24, 2), Eigen::Index{1} << 24);
  EXPECT_THROW(configuration_count(25, 2), std::invalid_argument);
  EXPECT_EQ(configuration_count(0, 5), 1);
}

TEST(Segments, ThreeParentsGiveEightSegments) {
  const Dataset ds = coin_flips(3, 500, 1);
  const LaggedParentSet spa{{2, 1}, {1, 1}, {1, 3}};
  const auto segs = build_segments(ds, spa, 2, 3);
  ASSERT_EQ(segs.size(), 8u);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    EXPECT_EQ(segs[k].config_index, static_cast<int>(k));
    EXPECT_EQ(segs[k].component, 2);
  }
}

TEST(Segments, SingleParentSplitsTheSeriesInTwo) {
  const int length = 4001;
  const Dataset ds = coin_flips(1, length, 2);
  const auto segs = build_segments(ds, LaggedParentSet{{0, 1}}, 0, 1);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].length() + segs[1].length(), length - 1);
  EXPECT_NEAR(segs[0].length(), (length - 1) / 2.0, 150);
}

TEST(Segments, ConstantSeriesLeavesOneSegmentEmpty) {
  const Dataset ds = fixtures::dataset_from_rows({std::vector<int>(100, 0)});
  const auto segs = build_segments(ds, LaggedParentSet{{0, 1}}, 0, 1);
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].length(), 99);
  EXPECT_TRUE(segs[1].empty());
}

TEST(Segments, PartitionAndReconstruction) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = coin_flips(3, 700, 10 + seed);
    const LaggedParentSet spa{{0, 1}, {1, 4}, {2, 2}};
    const int tau = spa.max_lag();
    const auto segs = build_segments(ds, spa, 1, tau);
    std::vector<int> seen(700, 0), rebuilt(700, -1);
    for (const auto& seg : segs) {
      ASSERT_EQ(seg.values.size(), seg.time_indices.size());
      for (std::size_t k = 0; k < seg.values.size(); ++k) {
        const int t = seg.time_indices[k];
        if (k > 0) {
          EXPECT_LT(seg.time_indices[k - 1], t);
        }
        ++seen[static_cast<std::size_t>(t)];
        rebuilt[static_cast<std::size_t>(t)] = seg.values[k];
        EXPECT_EQ(configuration_at(ds, spa, t), seg.config_index);
      }
    }
    for (int t = 0; t < 700; ++t) {
      EXPECT_EQ(seen[static_cast<std::size_t>(t)], t >= tau ? 1 : 0);
      if (t >= tau) EXPECT_EQ(rebuilt[static_cast<std::size_t>(t)], ds.code(1, t));
    }
  }
}

TEST(Segments, WithinRegimeValuesFollowTheTableRow) {
  Eigen::MatrixXd pre(2, 2), post(2, 2);
  pre << 0.7, 0.3, 0.2, 0.8;
  post << 0.3, 0.7, 0.6, 0.4;
  const ScmSpec spec = fixtures::soft_spec(20000, 1, {LaggedParentSet{{0, 1}}}, {pre}, {post}, {10000}, 3);
  const Dataset ds = simulate(spec).data;
  const auto segs = build_segments(ds, LaggedParentSet{{0, 1}}, 0, 1);
  double stat = 0.0;
  for (int regime = 0; regime < 2; ++regime)
    for (const auto& seg : segs) {
      const Eigen::MatrixXd& cpt = regime == 0 ? pre : post;
      double n = 0.0, ones = 0.0;
      for (std::size_t k = 0; k < seg.values.size(); ++k)
        if ((seg.time_indices[k] < 10000) == (regime == 0)) {
          n += 1.0;
          ones += seg.values[k];
        }
      const double e1 = n * cpt(seg.config_index, 1), e0 = n - e1;
      stat += (ones - e1) * (ones - e1) / e1 + (n - ones - e0) * (n - ones - e0) / e0;
    }
  boost::math::chi_squared dist(4);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001);
}

TEST(Segments, RejectsBadArguments) {
  const Dataset ds = coin_flips(2, 50, 4);
  EXPECT_THROW(build_segments(ds, LaggedParentSet{{0, 3}}, 0, 2), std::invalid_argument);
  EXPECT_THROW(build_segments(ds, LaggedParentSet{{5, 1}}, 0, 1), std::invalid_argument);
}

TEST(SegmentDump, RoundTripsThroughCsv) {
  const auto dir = fixtures::fresh_dir("segment_dump");
  const Dataset ds = coin_flips(2, 300, 5);
  const auto segs = build_segments(ds, LaggedParentSet{{0, 1}, {1, 2}}, 0, 2);
  dump_segments(ds, segs, dir);
  const auto files = load_segment_dump(dir);
  std::size_t nonempty = 0;
  for (const auto& seg : segs) nonempty += !seg.empty();
  ASSERT_EQ(files.size(), nonempty);
  std::size_t f = 0;
  for (const auto& seg : segs) {
    if (seg.empty()) continue;
    EXPECT_EQ(files[f].times, seg.time_indices);
    std::vector<int> symbols;
    for (int code : seg.values) symbols.push_back(ds.domain().symbol(code));
    EXPECT_EQ(files[f].symbols, symbols);
    ++f;
  }
}

TEST(SegmentDump, RejectsUnorderedTimes) {
  const auto dir = fixtures::fresh_dir("segment_dump_bad");
  std::ofstream(dir / "X1_L00000.csv") << "t,value\n5,0\n3,1\n";
  EXPECT_THROW(load_segment_dump(dir), DataError);
}
