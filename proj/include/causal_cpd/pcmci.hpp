#ifndef CAUSAL_CPD_PCMCI_HPP
#define CAUSAL_CPD_PCMCI_HPP

#include <span>
#include <vector>

#include "causal_cpd/citest.hpp"
#include "causal_cpd/dataset.hpp"
#include "causal_cpd/lagged_parents.hpp"

namespace ccpd {

struct DiscoveryConfig {
  int tau_ub = 5;
  double alpha_level = 0.01;
  int n_intervals = 2;
  /// Largest conditioning set used while pruning candidates.
  int pc_max_conds = 3;
  /// How many of the source's own strongest parents enter a momentary test.
  int max_conds_px = 3;

  void validate() const;
};

/// 20 * s^(pc_max_conds + 2).
int min_interval_samples(const DiscoveryConfig& cfg, int domain_size);

/// Target-time intervals used by discover_superset.
std::vector<TimeRange> discovery_intervals(int length, const DiscoveryConfig& cfg);

struct LinkScore {
  LaggedLink link;
  double p_value = 1.0;
  double statistic = 0.0;
};

/// Discovered graph plus, per component, its links strongest first
/// (smallest momentary p-value, then largest statistic, then link order).
struct ScoredGraph {
  ParentGraph graph;
  std::vector<std::vector<LinkScore>> ranked;
};

/// Two-phase lagged discovery on target times in `range`: iterative
/// condition selection, then momentary conditional independence tests.
ParentGraph discover_interval(const Dataset& ds, const DiscoveryConfig& cfg, TimeRange range);
ScoredGraph discover_interval_scored(const Dataset& ds, const DiscoveryConfig& cfg, TimeRange range);

/// Union of discover_interval over n_intervals equal consecutive intervals.
/// Throws DataError (naming the required length) when an interval is
/// shorter than min_interval_samples.
ParentGraph discover_superset(const Dataset& ds, const DiscoveryConfig& cfg);
/// Same union; a link's score is its strongest result over the intervals.
ScoredGraph discover_superset_scored(const Dataset& ds, const DiscoveryConfig& cfg);

struct RefinedGraphs {
  ParentGraph pre;
  ParentGraph post;
  /// Side had too few samples (or no split) and was returned unpruned.
  std::vector<bool> pre_unpruned;
  std::vector<bool> post_unpruned;
};

/// For every component j and every link X^i_{t-tau} in spa_hat[j], drops the
/// link on a side of the split when it is independent of X^j_t given
/// (spa_hat[j] | spa_hat[i] shifted by tau) minus the link itself, using only
/// that side's target times (t < split and t >= split). A NaN split leaves
/// the component unpruned.
RefinedGraphs refine_after_split(const Dataset& ds, const ParentGraph& spa_hat,
                                 std::span<const double> split_times, const DiscoveryConfig& cfg);

}  // namespace ccpd

#endif  // CAUSAL_CPD_PCMCI_HPP
