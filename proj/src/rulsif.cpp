#include "causal_cpd/rulsif.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace ccpd {

Eigen::VectorXd empirical_distribution(std::span<const int> codes, int domain_size) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(domain_size);
  for (int c : codes) {
    if (c < 0 || c >= domain_size) throw std::invalid_argument("code outside the domain");
    counts(c) += 1.0;
  }
  if (!codes.empty()) counts /= static_cast<double>(codes.size());
  return counts;
}

double pe_plugin(std::span<const int> first_half, std::span<const int> second_half, int domain_size, double alpha) {
  if (first_half.empty() || second_half.empty()) throw std::invalid_argument("pe_plugin: both halves must be non-empty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return pe_closed_form(empirical_distribution(first_half, domain_size),
                        empirical_distribution(second_half, domain_size), alpha);
}

// ---------------------------------------------------------------------------
// Kernel estimator. Samples are codes, so every sum over a half reduces to a
// sum over distinct values weighted by their counts.

namespace {

struct Histogram {
  std::vector<int> values;    // distinct codes, ascending
  std::vector<double> count;  // occurrences of each
  double total = 0.0;
};

Histogram histogram(std::span<const int> codes) {
  std::vector<int> sorted(codes.begin(), codes.end());
  std::sort(sorted.begin(), sorted.end());
  Histogram h;
  for (std::size_t k = 0; k < sorted.size();) {
    std::size_t e = k;
    while (e < sorted.size() && sorted[e] == sorted[k]) ++e;
    h.values.push_back(sorted[k]);
    h.count.push_back(static_cast<double>(e - k));
    k = e;
  }
  h.total = static_cast<double>(sorted.size());
  return h;
}

Eigen::RowVectorXd features(int value, const Eigen::VectorXd& centers, double sigma) {
  return (-(centers.array() - value).square() / (2.0 * sigma * sigma)).exp().matrix().transpose();
}

// Ratio model fitted on one pair of halves.
struct RatioFit {
  Eigen::VectorXd theta;
  Eigen::VectorXd centers;
  double sigma;

  double operator()(int value) const { return features(value, centers, sigma).dot(theta); }
};

RatioFit fit_ratio(const Histogram& first, const Histogram& second, const Eigen::VectorXd& centers, double sigma,
                   double lambda, double alpha) {
  const Eigen::Index b = centers.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(b, b);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(b);
  for (std::size_t k = 0; k < first.values.size(); ++k) {
    const Eigen::RowVectorXd phi = features(first.values[k], centers, sigma);
    const double w = first.count[k] / first.total;
    H.noalias() += (1.0 - alpha) * w * phi.transpose() * phi;
    h.noalias() += w * phi.transpose();
  }
  for (std::size_t k = 0; k < second.values.size(); ++k) {
    const Eigen::RowVectorXd phi = features(second.values[k], centers, sigma);
    H.noalias() += alpha * (second.count[k] / second.total) * phi.transpose() * phi;
  }
  H.diagonal().array() += lambda;
  return {H.ldlt().solve(h), centers, sigma};
}

double pe_from_fit(const RatioFit& r, const Histogram& first, const Histogram& second, double alpha) {
  double mean1_r = 0.0, mean1_r2 = 0.0, mean2_r2 = 0.0;
  for (std::size_t k = 0; k < first.values.size(); ++k) {
    const double v = r(first.values[k]);
    const double w = first.count[k] / first.total;
    mean1_r += w * v;
    mean1_r2 += w * v * v;
  }
  for (std::size_t k = 0; k < second.values.size(); ++k) {
    const double v = r(second.values[k]);
    mean2_r2 += second.count[k] / second.total * v * v;
  }
  return -(1.0 - alpha) / 2.0 * mean1_r2 - alpha / 2.0 * mean2_r2 + mean1_r - 0.5;
}

// Held-out squared loss of the ratio model (up to a constant).
double holdout_loss(const RatioFit& r, const Histogram& first, const Histogram& second, double alpha) {
  double mean1_r = 0.0, mean1_r2 = 0.0, mean2_r2 = 0.0;
  for (std::size_t k = 0; k < first.values.size(); ++k) {
    const double v = r(first.values[k]);
    mean1_r += first.count[k] / first.total * v;
    mean1_r2 += first.count[k] / first.total * v * v;
  }
  for (std::size_t k = 0; k < second.values.size(); ++k) {
    const double v = r(second.values[k]);
    mean2_r2 += second.count[k] / second.total * v * v;
  }
  return 0.5 * ((1.0 - alpha) * mean1_r2 + alpha * mean2_r2) - mean1_r;
}

Eigen::VectorXd pick_centers(std::span<const int> first, int max_centers) {
  const auto n = static_cast<Eigen::Index>(first.size());
  const Eigen::Index b = std::min<Eigen::Index>(n, std::max(1, max_centers));
  Eigen::VectorXd centers(b);
  for (Eigen::Index k = 0; k < b; ++k) centers(k) = first[static_cast<std::size_t>(k * n / b)];
  return centers;
}

}  // namespace

double median_pairwise_distance(std::span<const int> first, std::span<const int> second) {
  std::vector<int> pooled(first.begin(), first.end());
  pooled.insert(pooled.end(), second.begin(), second.end());
  const Histogram h = histogram(pooled);
  if (pooled.size() < 2) return 0.0;
  // (distance, number of unordered pairs at that distance)
  std::vector<std::pair<int, double>> dist;
  for (std::size_t a = 0; a < h.values.size(); ++a) {
    dist.push_back({0, h.count[a] * (h.count[a] - 1.0) / 2.0});
    for (std::size_t b = a + 1; b < h.values.size(); ++b)
      dist.push_back({h.values[b] - h.values[a], h.count[a] * h.count[b]});
  }
  std::sort(dist.begin(), dist.end());
  const double pairs = h.total * (h.total - 1.0) / 2.0;
  // 1-based ranks of the middle element(s).
  auto at_rank = [&](double rank) {
    double seen = 0.0;
    for (const auto& [d, c] : dist) {
      seen += c;
      if (seen >= rank) return static_cast<double>(d);
    }
    return static_cast<double>(dist.back().first);
  };
  const auto half = static_cast<double>(static_cast<long long>(pairs) / 2);
  if (static_cast<long long>(pairs) % 2 == 1) return at_rank(half + 1.0);
  return 0.5 * (at_rank(half) + at_rank(half + 1.0));
}

double pe_kernel(std::span<const int> first_half, std::span<const int> second_half, const KernelParams& params,
                 double alpha) {
  if (first_half.empty() || second_half.empty()) throw std::invalid_argument("pe_kernel: both halves must be non-empty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (params.max_centers < 1) throw std::invalid_argument("max_centers must be >= 1");
  if (!(params.lambda > 0.0)) throw std::invalid_argument("kernel lambda must be > 0");

  double sigma = params.sigma;
  if (!(sigma > 0.0)) sigma = std::max(median_pairwise_distance(first_half, second_half), params.sigma_floor);
  double lambda = params.lambda;
  const Eigen::VectorXd centers = pick_centers(first_half, params.max_centers);
  const Histogram first = histogram(first_half), second = histogram(second_half);

  if (params.cross_validate) {
    const int folds = std::max(2, params.folds);
    const std::array<double, 5> sigma_scale = {0.6, 0.8, 1.0, 1.2, 1.4};
    const std::array<double, 3> lambdas = {1e-3, 1e-2, 1e-1};
    auto fold_split = [&](std::span<const int> codes, int fold, bool held_out) {
      std::vector<int> out;
      for (std::size_t k = 0; k < codes.size(); ++k)
        if ((static_cast<int>(k % static_cast<std::size_t>(folds)) == fold) == held_out) out.push_back(codes[k]);
      return out;
    };
    double best = std::numeric_limits<double>::infinity();
    const double base_sigma = sigma;
    for (double scale : sigma_scale)
      for (double lam : lambdas) {
        double loss = 0.0;
        for (int f = 0; f < folds; ++f) {
          const auto tr1 = fold_split(first_half, f, false), te1 = fold_split(first_half, f, true);
          const auto tr2 = fold_split(second_half, f, false), te2 = fold_split(second_half, f, true);
          if (tr1.empty() || te1.empty() || tr2.empty() || te2.empty()) continue;
          const RatioFit fit = fit_ratio(histogram(tr1), histogram(tr2), centers, base_sigma * scale, lam, alpha);
          loss += holdout_loss(fit, histogram(te1), histogram(te2), alpha);
        }
        if (loss < best) {
          best = loss;
          sigma = base_sigma * scale;
          lambda = lam;
        }
      }
  }

  const double pe = pe_from_fit(fit_ratio(first, second, centers, sigma, lambda, alpha), first, second, alpha);
  if (!std::isfinite(pe)) throw std::runtime_error("kernel divergence estimate is not finite");
  return pe;
}

const char* to_string(Estimator e) { return e == Estimator::plugin ? "plugin" : "kernel"; }

Estimator parse_estimator(const std::string& text) {
  if (text == "plugin") return Estimator::plugin;
  if (text == "kernel") return Estimator::kernel;
  throw std::invalid_argument("estimator must be 'plugin' or 'kernel', got '" + text + "'");
}

void PeParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n_w < 2) throw std::invalid_argument("n_w must be >= 2");
  if (n_st < 1) throw std::invalid_argument("n_st must be >= 1");
  if (estimator == Estimator::kernel) {
    if (kernel.max_centers < 1) throw std::invalid_argument("max_centers must be >= 1");
    if (!(kernel.lambda > 0.0)) throw std::invalid_argument("kernel lambda must be > 0");
  }
}

int window_count(int t_sub, int n_w, int n_st) {
  if (t_sub < 2 * n_w) return 0;
  return (t_sub - 2 * n_w) / n_st + 1;
}

namespace {

PeSeries scan(std::span<const int> values, std::span<const int> times, int domain_size, const PeParams& params) {
  params.validate();
  PeSeries out;
  const int windows = window_count(static_cast<int>(values.size()), params.n_w, params.n_st);
  if (windows == 0) {
    out.too_short = true;
    return out;
  }
  const auto nw = static_cast<std::size_t>(params.n_w);
  out.scores.reserve(static_cast<std::size_t>(windows));
  out.spans.reserve(static_cast<std::size_t>(windows));
  for (int i = 0; i < windows; ++i) {
    const auto start = static_cast<std::size_t>(i) * static_cast<std::size_t>(params.n_st);
    const auto first = values.subspan(start, nw);
    const auto second = values.subspan(start + nw, nw);
    out.scores.push_back(params.estimator == Estimator::plugin ? pe_plugin(first, second, domain_size, params.alpha)
                                                               : pe_kernel(first, second, params.kernel, params.alpha));
    out.spans.push_back({times[start], times[start + nw - 1], times[start + nw], times[start + 2 * nw - 1]});
  }
  return out;
}

}  // namespace

PeSeries pe_series(const Segment& seg, int domain_size, const PeParams& params) {
  PeSeries out = scan(seg.values, seg.time_indices, domain_size, params);
  out.component = seg.component;
  out.config_index = seg.config_index;
  return out;
}

PeSeries pe_series(std::span<const int> codes, int domain_size, const PeParams& params) {
  std::vector<int> times(codes.size());
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<int>(k);
  return scan(codes, times, domain_size, params);
}

}  // namespace ccpd
