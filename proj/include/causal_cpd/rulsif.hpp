#ifndef CAUSAL_CPD_RULSIF_HPP
#define CAUSAL_CPD_RULSIF_HPP

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causal_cpd/segments.hpp"

namespace ccpd {

/// Relative Pearson divergence between two distributions on a finite domain,
///   PE = 1/2 sum_h p_h^2 / ((1 - ab) p_h + ab p'_h) - 1/2,
/// i.e. 1/2 E_q[(p/q - 1)^2] with q the ab-mixture of p and p'. Evaluated as
/// ab^2/2 sum_h (p_h - p'_h)^2 / q_h, which avoids cancellation near zero.
/// Returns +inf when the mixture vanishes where p does not.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar pe_closed_form(const Eigen::MatrixBase<DerivedP>& p,
                                         const Eigen::MatrixBase<DerivedQ>& p_prime,
                                         typename DerivedP::Scalar alpha_beta) {
  using Scalar = typename DerivedP::Scalar;
  eigen_assert(p.size() == p_prime.size());
  Scalar sum(0);
  for (Eigen::Index h = 0; h < p.size(); ++h) {
    const Scalar ph = p.derived().coeff(h);
    const Scalar pph = Scalar(p_prime.derived().coeff(h));
    const Scalar q = (Scalar(1) - alpha_beta) * ph + alpha_beta * pph;
    if (!(q > Scalar(0))) {
      if (ph > Scalar(0)) return std::numeric_limits<Scalar>::infinity();
      continue;
    }
    sum += (ph - pph) * (ph - pph) / q;
  }
  return alpha_beta * alpha_beta * sum / Scalar(2);
}

/// Symbol frequencies of `codes` over {0, ..., domain_size-1}.
Eigen::VectorXd empirical_distribution(std::span<const int> codes, int domain_size);

/// Plug-in estimate: pe_closed_form of the two halves' empirical laws at
/// alpha, the second half standing in for the (possibly mixed) p'.
double pe_plugin(std::span<const int> first_half, std::span<const int> second_half, int domain_size,
                 double alpha);

struct KernelParams {
  /// Gaussian width; <= 0 selects the median heuristic.
  double sigma = 0.0;
  double sigma_floor = 0.1;
  double lambda = 0.01;
  /// Centers are at most min(max_centers, |first half|) first-half points.
  int max_centers = 100;
  /// 5-fold grid search over sigma x {0.6..1.4} and lambda in {1e-3,1e-2,1e-1}.
  bool cross_validate = false;
  int folds = 5;
};

/// Median of |a - b| over all unordered pairs of the pooled codes.
double median_pairwise_distance(std::span<const int> first, std::span<const int> second);

/// Kernel least-squares fit of the relative ratio r = p / ((1-alpha)p + alpha p')
/// on Gaussian features of the codes, then
///   PE = -(1-alpha)/2 mean_1[r^2] - alpha/2 mean_2[r^2] + mean_1[r] - 1/2.
/// Throws std::runtime_error on a non-finite score.
double pe_kernel(std::span<const int> first_half, std::span<const int> second_half, const KernelParams& params,
                 double alpha);

enum class Estimator { plugin, kernel };

const char* to_string(Estimator e);
Estimator parse_estimator(const std::string& text);

struct PeParams {
  double alpha = 0.1;
  /// Samples per window half.
  int n_w = 50;
  /// Window stride.
  int n_st = 1;
  Estimator estimator = Estimator::plugin;
  KernelParams kernel;

  void validate() const;
};

/// Number of sliding windows over a segment of length t_sub:
/// floor((t_sub - 2 n_w) / n_st) + 1, or 0 when t_sub < 2 n_w.
int window_count(int t_sub, int n_w, int n_st);

/// Original-time extent of one window: [first_begin, first_end] is W1,
/// [second_begin, second_end] is W2 (inclusive).
struct WindowSpan {
  int first_begin = 0;
  int first_end = 0;
  int second_begin = 0;
  int second_end = 0;
};

struct PeSeries {
  int component = 0;
  int config_index = 0;
  std::vector<double> scores;
  std::vector<WindowSpan> spans;
  /// Segment shorter than 2 n_w; no windows.
  bool too_short = false;

  std::size_t size() const { return scores.size(); }
  bool empty() const { return scores.empty(); }
};

/// Window i compares positions [i n_st, i n_st + n_w) with
/// [i n_st + n_w, i n_st + 2 n_w) of the segment.
PeSeries pe_series(const Segment& seg, int domain_size, const PeParams& params);

/// Scores for a raw code sequence whose positions are also its times.
PeSeries pe_series(std::span<const int> codes, int domain_size, const PeParams& params);

}  // namespace ccpd

#endif  // CAUSAL_CPD_RULSIF_HPP
