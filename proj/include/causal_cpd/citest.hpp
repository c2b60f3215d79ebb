#ifndef CAUSAL_CPD_CITEST_HPP
#define CAUSAL_CPD_CITEST_HPP

#include <span>
#include <vector>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/lagged_parents.hpp"

namespace ccpd {

/// Half-open range of target times [begin, end).
struct TimeRange {
  int begin = 0;
  int end = 0;

  int size() const { return end > begin ? end - begin : 0; }
};

/// X^x.component_{t - x.lag} _||_ X^target_t | cond, all lags relative to t.
struct CiQuery {
  LaggedLink x;
  int target = 0;
  LaggedParentSet cond;
  double alpha_level = 0.01;
};

struct CiVerdict {
  bool independent = true;
  double p_value = 1.0;
  double statistic = 0.0;
  int dof = 0;
  long effective_samples = 0;
  /// Fewer than 5 s^2 samples per occupied stratum, so part of the data
  /// fell into untestable strata.
  bool sparse = false;
};

/// G-test (likelihood ratio) of conditional independence on aligned code
/// columns. Per conditioning stratum, rows/columns with zero marginal are
/// dropped from the degrees of freedom and strata holding fewer than five
/// samples per effective cell are left out. With no testable stratum left
/// the result is independent with p = 1.
CiVerdict g_test(std::span<const int> x, std::span<const int> y,
                 const std::vector<std::span<const int>>& cond, int domain_size, double alpha_level);

/// Dataset form: builds the lagged columns for target times in `range`
/// (clipped so every lag stays inside the series).
/// Throws std::invalid_argument for malformed queries and DataError when no
/// sample remains.
CiVerdict g_test(const Dataset& ds, const CiQuery& query, TimeRange range);

}  // namespace ccpd

#endif  // CAUSAL_CPD_CITEST_HPP
