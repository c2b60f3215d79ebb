#ifndef CAUSAL_CPD_EVAL_HPP
#define CAUSAL_CPD_EVAL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "causal_cpd/detector.hpp"
#include "causal_cpd/scm_gen.hpp"

namespace ccpd {

struct MeanChangeResult {
  int index = 0;
  /// Constant series; the midpoint was returned.
  bool flagged = false;
};

/// CUSUM change in mean: argmax over k in [1, L) of
/// |mean(x[0,k)) - mean(x[k,L))| * sqrt(k (L-k) / L). The returned index is
/// the first sample after the split. Requires L >= 4.
MeanChangeResult mean_change_baseline(std::span<const int> series);

/// A change-point method under evaluation: one estimate per component.
struct Method {
  std::string name;
  std::function<std::vector<double>(const Dataset&, const GroundTruth&)> estimate;
};

Method causal_rulsif_method(const DetectorConfig& cfg, bool oracle_parents = false);
Method mean_change_method();
/// Returns the true change points; harness sanity check.
Method oracle_method();

struct TrialBatchConfig {
  GeneratorOptions spec_template;
  DetectorConfig detector;
  int n_trials = 100;
  std::uint64_t seed = 0;
  std::vector<double> q_grid = {10, 25, 50, 100, 200};
  std::string setting = "default";

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::string method;
  int component = 0;
  int true_change = 0;
  double estimate = 0.0;
  /// |estimate - true_change| / T.
  double error = 0.0;
  bool failed = false;
  std::string message;
  double seconds = 0.0;
};

struct MethodMetrics {
  std::string method;
  int samples = 0;
  int failed = 0;
  double mean_error = 0.0;
  double stderr_error = 0.0;
  std::vector<double> accuracy;
  std::vector<double> accuracy_stderr;
  double mean_seconds = 0.0;
};

struct MetricsReport {
  std::string setting;
  int length = 0;
  std::vector<double> q_grid;
  std::vector<MethodMetrics> methods;
  /// Raw per-(trial, method, component) log in trial order.
  std::vector<TrialRecord> records;

  const MethodMetrics& method(const std::string& name) const;
};

/// Fraction of records with |estimate - truth| <= q among non-failed ones.
double accuracy_at(std::span<const TrialRecord> records, double q);

/// Aggregates raw records (per method, in first-seen order).
MetricsReport aggregate(std::vector<TrialRecord> records, const std::vector<double>& q_grid, int length,
                        std::string setting);

/// Runs every trial (generation with seed derive_seed(seed, trial), then each
/// method) and aggregates. Failures are recorded, never dropped.
MetricsReport run_batch(const TrialBatchConfig& cfg, const std::vector<Method>& methods);

}  // namespace ccpd

#endif  // CAUSAL_CPD_EVAL_HPP
