#include "causal_cpd/lagged_parents.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccpd {

LaggedParentSet::LaggedParentSet(std::initializer_list<LaggedLink> links)
    : LaggedParentSet(std::vector<LaggedLink>(links)) {}

LaggedParentSet::LaggedParentSet(std::vector<LaggedLink> links) : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end());
  links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
}

bool LaggedParentSet::insert(LaggedLink link) {
  auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it != links_.end() && *it == link) return false;
  links_.insert(it, link);
  return true;
}

bool LaggedParentSet::erase(LaggedLink link) {
  auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it == links_.end() || *it != link) return false;
  links_.erase(it);
  return true;
}

bool LaggedParentSet::contains(LaggedLink link) const {
  return std::binary_search(links_.begin(), links_.end(), link);
}

int LaggedParentSet::max_lag() const {
  int m = 0;
  for (const auto& l : links_) m = std::max(m, l.lag);
  return m;
}

LaggedParentSet LaggedParentSet::shifted(int by) const {
  LaggedParentSet out;
  out.links_.reserve(links_.size());
  for (auto l : links_) out.links_.push_back({l.component, l.lag + by});
  return out;
}

bool LaggedParentSet::is_subset_of(const LaggedParentSet& other) const {
  return std::includes(other.links_.begin(), other.links_.end(), links_.begin(), links_.end());
}

LaggedParentSet& LaggedParentSet::operator|=(const LaggedParentSet& other) {
  std::vector<LaggedLink> merged;
  merged.reserve(links_.size() + other.links_.size());
  std::set_union(links_.begin(), links_.end(), other.links_.begin(), other.links_.end(), std::back_inserter(merged));
  links_ = std::move(merged);
  return *this;
}

ParentGraph graph_union(const ParentGraph& a, const ParentGraph& b) {
  if (a.size() != b.size()) throw std::invalid_argument("graph_union: component counts differ");
  ParentGraph out = a;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] |= b[j];
  return out;
}

bool graph_is_subset(const ParentGraph& inner, const ParentGraph& outer) {
  if (inner.size() != outer.size()) return false;
  for (std::size_t j = 0; j < inner.size(); ++j)
    if (!inner[j].is_subset_of(outer[j])) return false;
  return true;
}

}  // namespace ccpd
