#include <gtest/gtest.h>

#include <cmath>

#include "causal_cpd/rng.hpp"
#include "causal_cpd/rulsif.hpp"

using namespace ccpd;

namespace {

// 1/2 sum_h q_h (p_h / q_h - 1)^2 summed over the outcomes directly.
double brute_force_pe(const std::vector<double>& p, const std::vector<double>& pp, double ab) {
  double total = 0.0;
  for (std::size_t h = 0; h < p.size(); ++h) {
    const double q = (1.0 - ab) * p[h] + ab * pp[h];
    if (q == 0.0) continue;
    const double r = p[h] / q;
    total += q * (r - 1.0) * (r - 1.0);
  }
  return 0.5 * total;
}

std::vector<int> draw(Rng& rng, int n, double p0) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform() < p0 ? 0 : 1;
  return v;
}

Eigen::VectorXd random_simplex(Rng& rng, int s) {
  Eigen::VectorXd v(s);
  for (int h = 0; h < s; ++h) v(h) = -std::log(1.0 - rng.uniform());
  return v / v.sum();
}

const double kReferencePe = 0.0032206119162641045;

}  // namespace

TEST(ClosedForm, MatchesBruteForceSummation) {
  const Eigen::Vector2d p(0.5, 0.5), pp(0.9, 0.1);
  EXPECT_NEAR(brute_force_pe({0.5, 0.5}, {0.9, 0.1}, 0.1), kReferencePe, 1e-15);
  EXPECT_NEAR(pe_closed_form(p, pp, 0.1), kReferencePe, 1e-15);
}

TEST(ClosedForm, ZeroWhenEqualOrUnmixed) {
  const Eigen::Vector3d p(0.2, 0.3, 0.5), pp(0.6, 0.1, 0.3);
  EXPECT_NEAR(pe_closed_form(p, p, 0.4), 0.0, 1e-15);
  EXPECT_NEAR(pe_closed_form(p, pp, 0.0), 0.0, 1e-15);
}

TEST(ClosedForm, UnboundedRatioIsInfinite) {
  EXPECT_TRUE(std::isinf(pe_closed_form(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), 1.0)));
}

TEST(ClosedForm, NonNegativeAndNondecreasingInTheMixture) {
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const int s = 2 + k % 4;
    const Eigen::VectorXd p = random_simplex(rng, s), pp = random_simplex(rng, s);
    double last = -1.0;
    for (int g = 0; g < 100; ++g) {
      const double ab = g / 99.0;
      const double v = pe_closed_form(p, pp, ab);
      EXPECT_GE(v, -1e-15);
      EXPECT_GE(v, last - 1e-12);
      last = v;
    }
    EXPECT_GT(pe_closed_form(p, pp, 0.5), 0.0);
  }
}

TEST(Plugin, EqualsTheClosedFormOnExactFrequencies) {
  // 10 samples each: frequencies (0.3, 0.7) and (0.8, 0.2).
  const std::vector<int> a{0, 0, 0, 1, 1, 1, 1, 1, 1, 1}, b{0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  EXPECT_NEAR(pe_plugin(a, b, 2, 0.25), pe_closed_form(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.8, 0.2), 0.25),
              1e-12);
  EXPECT_NEAR(pe_plugin(a, a, 2, 0.1), 0.0, 1e-15);
  std::vector<int> shuffled = a;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_NEAR(pe_plugin(a, shuffled, 2, 0.1), 0.0, 1e-15);
}

TEST(Plugin, RejectsBadInput) {
  const std::vector<int> a{0, 1};
  EXPECT_THROW(pe_plugin(a, {}, 2, 0.1), std::invalid_argument);
  EXPECT_THROW(pe_plugin(a, a, 2, 0.0), std::invalid_argument);
  EXPECT_THROW(pe_plugin(a, a, 2, 1.0), std::invalid_argument);
}

TEST(Plugin, NullWindowsStayNearZero) {
  Rng rng(2);
  int small = 0;
  for (int k = 0; k < 1000; ++k) {
    const double p0 = 0.1 + 0.8 * rng.uniform();
    small += std::abs(pe_plugin(draw(rng, 50, p0), draw(rng, 50, p0), 2, 0.1)) < 0.1;
  }
  EXPECT_GE(small, 950);
}

TEST(Plugin, ConsistentAtLargeWindows) {
  Rng rng(3);
  for (int k = 0; k < 20; ++k)
    EXPECT_NEAR(pe_plugin(draw(rng, 500, 0.5), draw(rng, 500, 0.9), 2, 0.1), kReferencePe, 0.02);
}

TEST(Kernel, NullCaseIsSmall) {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const auto a = draw(rng, 50, 0.3);
    EXPECT_LT(std::abs(pe_kernel(a, a, KernelParams{}, 0.1)), 0.05);
    KernelParams wide;
    wide.sigma = 2.0;
    wide.lambda = 0.1;
    EXPECT_LT(std::abs(pe_kernel(a, a, wide, 0.1)), 0.05);
  }
}

TEST(Kernel, AgreesWithThePluginOnBinaryWindows) {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto a = draw(rng, 500, 0.5), b = draw(rng, 500, 0.9);
    EXPECT_NEAR(pe_kernel(a, b, KernelParams{}, 0.1), pe_plugin(a, b, 2, 0.1), 0.05);
  }
}

TEST(Kernel, AgreementTightensWithWindowSize) {
  Rng rng(6);
  auto mean_gap = [&](int n_w) {
    double gap = 0.0;
    for (int k = 0; k < 30; ++k) {
      const auto a = draw(rng, n_w, 0.3), b = draw(rng, n_w, 0.7);
      gap += std::abs(pe_kernel(a, b, KernelParams{}, 0.1) - pe_plugin(a, b, 2, 0.1));
    }
    return gap / 30.0;
  };
  const double g100 = mean_gap(100), g500 = mean_gap(500), g2000 = mean_gap(2000);
  EXPECT_GE(g100 + 1e-4, g500);
  EXPECT_GE(g500 + 1e-4, g2000);
  EXPECT_LT(g2000, 0.01);
}

TEST(Kernel, MedianDistanceAndWidthFloor) {
  const std::vector<int> zeros(20, 0), mostly{0, 0, 0, 1};
  EXPECT_EQ(median_pairwise_distance(zeros, zeros), 0.0);
  // 28 pairs among {0 x7, 1}: 7 differ, so the median is 0.
  EXPECT_EQ(median_pairwise_distance(mostly, mostly), 0.0);
  const std::vector<int> half{0, 1}, other{0, 1};
  // Pairs of {0, 1, 0, 1}: 4 of 6 differ.
  EXPECT_EQ(median_pairwise_distance(half, other), 1.0);
  // A zero median width is floored rather than producing NaN.
  EXPECT_TRUE(std::isfinite(pe_kernel(zeros, mostly, KernelParams{}, 0.1)));
}

TEST(Kernel, CrossValidationRuns) {
  Rng rng(7);
  KernelParams cv;
  cv.cross_validate = true;
  const auto a = draw(rng, 200, 0.5), b = draw(rng, 200, 0.9);
  const double v = pe_kernel(a, b, cv, 0.1);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, pe_plugin(a, b, 2, 0.1), 0.05);
}

TEST(Windows, CountFormulaSweep) {
  for (int t_sub = 0; t_sub < 120; ++t_sub)
    for (int n_w = 2; n_w < 20; ++n_w)
      for (int n_st = 1; n_st < 6; ++n_st) {
        std::vector<int> codes(static_cast<std::size_t>(t_sub), 0);
        PeParams params;
        params.n_w = n_w;
        params.n_st = n_st;
        const PeSeries s = pe_series(codes, 2, params);
        const int expected = t_sub >= 2 * n_w ? (t_sub - 2 * n_w) / n_st + 1 : 0;
        ASSERT_EQ(window_count(t_sub, n_w, n_st), expected);
        ASSERT_EQ(static_cast<int>(s.size()), expected);
        ASSERT_EQ(s.too_short, expected == 0);
      }
}

TEST(Windows, BoundaryLengths) {
  PeParams params;
  params.n_w = 10;
  EXPECT_EQ(pe_series(std::vector<int>(20, 0), 2, params).size(), 1u);
  const PeSeries s = pe_series(std::vector<int>(19, 0), 2, params);
  EXPECT_TRUE(s.empty());
  EXPECT_TRUE(s.too_short);
}

TEST(Windows, SpansUseOriginalTimes) {
  Segment seg;
  for (int k = 0; k < 12; ++k) {
    seg.values.push_back(k % 2);
    seg.time_indices.push_back(3 * k + 1);
  }
  PeParams params;
  params.n_w = 4;
  params.n_st = 2;
  const PeSeries s = pe_series(seg, 2, params);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.spans[1].first_begin, 7);
  EXPECT_EQ(s.spans[1].first_end, 16);
  EXPECT_EQ(s.spans[1].second_begin, 19);
  EXPECT_EQ(s.spans[1].second_end, 28);
}

TEST(Windows, SeriesRisesThenFallsAroundTheChange) {
  Rng rng(8);
  std::vector<int> codes = draw(rng, 1000, 0.5);
  const auto post = draw(rng, 1000, 0.95);
  codes.insert(codes.end(), post.begin(), post.end());
  PeParams params;
  params.n_w = 200;
  const PeSeries s = pe_series(codes, 2, params);
  const auto peak = std::max_element(s.scores.begin(), s.scores.end()) - s.scores.begin();
  // Window i straddles the change at its W1/W2 boundary when i + n_w == 1000.
  EXPECT_NEAR(static_cast<double>(peak), 800.0, 60.0);
  EXPECT_LT(s.scores[0], 0.02);
  EXPECT_LT(s.scores.back(), 0.02);
  EXPECT_LT(s.scores[400], s.scores[700]);
  EXPECT_GT(s.scores[static_cast<std::size_t>(peak)], s.scores[1100]);
}

TEST(PeParams, Validation) {
  PeParams p;
  EXPECT_NO_THROW(p.validate());
  p.n_w = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = PeParams{};
  p.n_st = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = PeParams{};
  p.alpha = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_EQ(parse_estimator("kernel"), Estimator::kernel);
  EXPECT_THROW(parse_estimator("lsif"), std::invalid_argument);
}
