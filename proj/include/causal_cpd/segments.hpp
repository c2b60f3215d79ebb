#ifndef CAUSAL_CPD_SEGMENTS_HPP
#define CAUSAL_CPD_SEGMENTS_HPP

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/lagged_parents.hpp"

namespace ccpd {

/// All s^|parents| configurations of a parent set in odometer order (the
/// last parent varies fastest). Row k is configuration k.
struct ConfigMatrix {
  LaggedParentSet parents;
  int domain_size = 2;
  Eigen::MatrixXi rows;

  static ConfigMatrix build(const LaggedParentSet& parents, int domain_size);
  Eigen::Index count() const { return rows.rows(); }
};

/// s^m, throwing std::invalid_argument once it exceeds 2^24.
Eigen::Index configuration_count(std::size_t parents, int domain_size);

/// Values of one component at the times where its parent set takes one
/// fixed configuration.
struct Segment {
  int component = 0;
  int config_index = 0;
  std::vector<int> values;
  std::vector<int> time_indices;

  int length() const { return static_cast<int>(values.size()); }
  bool empty() const { return values.empty(); }
};

/// Configuration index of `parents` realized at time t (requires
/// t >= parents.max_lag()).
int configuration_at(const Dataset& ds, const LaggedParentSet& parents, int t);

/// Partitions times [tau_max_eff, T) of `component` by the configuration of
/// `spa`. One segment per configuration, empty ones included, so the vector
/// index equals the configuration index.
std::vector<Segment> build_segments(const Dataset& ds, const LaggedParentSet& spa, int component,
                                    int tau_max_eff);

/// One CSV per non-empty segment, `<name>_L<index>.csv`, columns t,value
/// (symbols, not codes).
void dump_segments(const Dataset& ds, std::span<const Segment> segments, const std::filesystem::path& dir);

struct SegmentFile {
  std::filesystem::path path;
  std::vector<int> times;
  std::vector<int> symbols;
};

/// Reads every segment CSV in `dir` (sorted by file name).
std::vector<SegmentFile> load_segment_dump(const std::filesystem::path& dir);

}  // namespace ccpd

#endif  // CAUSAL_CPD_SEGMENTS_HPP
