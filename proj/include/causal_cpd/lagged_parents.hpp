#ifndef CAUSAL_CPD_LAGGED_PARENTS_HPP
#define CAUSAL_CPD_LAGGED_PARENTS_HPP

#include <compare>
#include <initializer_list>
#include <vector>

namespace ccpd {

/// X^component_{t - lag} relative to some target at time t.
struct LaggedLink {
  int component = 0;
  int lag = 1;

  auto operator<=>(const LaggedLink&) const = default;
};

/// Sorted, duplicate-free set of lagged links ordered by (component, lag).
/// This order also fixes the column order of configuration matrices.
class LaggedParentSet {
 public:
  using const_iterator = std::vector<LaggedLink>::const_iterator;

  LaggedParentSet() = default;
  LaggedParentSet(std::initializer_list<LaggedLink> links);
  explicit LaggedParentSet(std::vector<LaggedLink> links);

  bool insert(LaggedLink link);
  bool erase(LaggedLink link);
  bool contains(LaggedLink link) const;

  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  int max_lag() const;
  const LaggedLink& operator[](std::size_t i) const { return links_[i]; }
  const_iterator begin() const { return links_.begin(); }
  const_iterator end() const { return links_.end(); }
  const std::vector<LaggedLink>& links() const { return links_; }

  /// Every lag increased by `by`.
  LaggedParentSet shifted(int by) const;
  bool is_subset_of(const LaggedParentSet& other) const;

  LaggedParentSet& operator|=(const LaggedParentSet& other);
  friend LaggedParentSet operator|(LaggedParentSet a, const LaggedParentSet& b) { return a |= b; }

  bool operator==(const LaggedParentSet&) const = default;

 private:
  std::vector<LaggedLink> links_;
};

/// One estimated (or true) parent set per component.
using ParentGraph = std::vector<LaggedParentSet>;

/// Componentwise union. Both graphs must have the same size.
ParentGraph graph_union(const ParentGraph& a, const ParentGraph& b);
bool graph_is_subset(const ParentGraph& inner, const ParentGraph& outer);

}  // namespace ccpd

#endif  // CAUSAL_CPD_LAGGED_PARENTS_HPP
