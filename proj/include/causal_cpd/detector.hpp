#ifndef CAUSAL_CPD_DETECTOR_HPP
#define CAUSAL_CPD_DETECTOR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/lagged_parents.hpp"
#include "causal_cpd/pcmci.hpp"
#include "causal_cpd/rulsif.hpp"

namespace ccpd {

struct DetectorConfig {
  DiscoveryConfig discovery;
  PeParams pe;
  /// Segments shorter than this are skipped; 0 means 2 n_w + 1.
  int min_segment_length = 0;
  bool refine = false;
  /// When set, peaks below the threshold are reported as not significant.
  std::optional<double> score_threshold;
  /// Cap on the discovered parents used for segmentation, strongest first.
  /// -1 picks the largest k with (T - tau_ub) / s^k >= 8 n_w; 0 keeps all.
  int max_segment_parents = -1;

  int resolved_min_segment_length() const { return min_segment_length > 0 ? min_segment_length : 2 * pe.n_w + 1; }
  /// Effective cap for a series of the given length (0: no cap).
  int resolved_segment_parents(int length, int domain_size) const;
  void validate() const;
};

struct SkippedSegment {
  int config_index = 0;
  int length = 0;
  std::string reason;
};

struct ComponentDetection {
  int component = 0;
  /// Parent set used for segmentation.
  LaggedParentSet spa;
  /// Everything discovery returned (equals spa unless the cap applied).
  LaggedParentSet spa_discovered;
  bool spa_capped = false;
  /// Discovery returned nothing and the self-lag (j, 1) was used instead.
  bool spa_fallback = false;

  bool detected = false;
  std::string no_detection_reason;

  int winning_config = -1;
  /// Window index on the winning segment.
  int window_index = -1;
  /// Segment position of the first W2 sample of the winning window.
  int change_position = -1;
  /// Original times of the last W1 sample and the first W2 sample.
  int t_before = -1;
  int t_after = -1;
  /// Midpoint of t_before and t_after.
  double projected_time = 0.0;
  double peak_score = 0.0;
  bool significant = true;
  /// The winning score was an unbounded ratio.
  bool infinite_score = false;

  std::map<int, PeSeries> series;
  std::vector<SkippedSegment> skipped;

  std::optional<LaggedParentSet> parents_pre;
  std::optional<LaggedParentSet> parents_post;
  bool pre_unpruned = false;
  bool post_unpruned = false;
};

struct DetectionReport {
  std::vector<ComponentDetection> components;
  ParentGraph spa_hat;
  bool oracle_parents = false;
};

struct ArgmaxResult {
  int config_index = -1;
  int window_index = -1;
  double score = 0.0;
};

/// Global maximum over (config, window). Ties go to the smaller config, then
/// the smaller window. NaN scores are ignored. Throws std::invalid_argument
/// when every series is empty.
ArgmaxResult argmax_with_ties(const std::map<int, PeSeries>& series);

/// Full pipeline: superset discovery, segmentation on the strongest
/// discovered parents, sliding-window PE, argmax, projection to original
/// time and optional refinement.
DetectionReport detect(const Dataset& ds, const DetectorConfig& cfg);

/// Same pipeline with a known parent graph in place of discovery (never
/// capped).
DetectionReport detect_with_parents(const Dataset& ds, const ParentGraph& spa, const DetectorConfig& cfg);

}  // namespace ccpd

#endif  // CAUSAL_CPD_DETECTOR_HPP
