#include "causal_cpd/pcmci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "causal_cpd/error.hpp"
#include "causal_cpd/parallel.hpp"

namespace ccpd {

void DiscoveryConfig::validate() const {
  if (tau_ub < 1) throw std::invalid_argument("tau_ub must be >= 1");
  if (n_intervals < 1) throw std::invalid_argument("n_intervals must be >= 1");
  if (pc_max_conds < 0) throw std::invalid_argument("pc_max_conds must be >= 0");
  if (max_conds_px < 0) throw std::invalid_argument("max_conds_px must be >= 0");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw std::invalid_argument("CI alpha level must lie in (0, 1)");
}

int min_interval_samples(const DiscoveryConfig& cfg, int domain_size) {
  double v = 20.0;
  for (int k = 0; k < cfg.pc_max_conds + 2; ++k) v *= domain_size;
  return v > 1e9 ? 1000000000 : static_cast<int>(v);
}

std::vector<TimeRange> discovery_intervals(int length, const DiscoveryConfig& cfg) {
  const int start = cfg.tau_ub;
  const long span = std::max(0, length - start);
  std::vector<TimeRange> out;
  for (int k = 0; k < cfg.n_intervals; ++k)
    out.push_back({start + static_cast<int>(span * k / cfg.n_intervals),
                   start + static_cast<int>(span * (k + 1) / cfg.n_intervals)});
  return out;
}

namespace {

// Condition selection for one target: returns the surviving candidates,
// strongest first.
std::vector<LaggedLink> select_conditions(const Dataset& ds, const DiscoveryConfig& cfg, TimeRange range, int target) {
  std::vector<LaggedLink> parents;
  for (int i = 0; i < ds.components(); ++i)
    for (int lag = 1; lag <= cfg.tau_ub; ++lag) parents.push_back({i, lag});
  std::map<LaggedLink, double> strength;
  for (const auto& l : parents) strength[l] = std::numeric_limits<double>::infinity();

  for (int p = 0; p <= cfg.pc_max_conds; ++p) {
    if (static_cast<int>(parents.size()) - 1 < p) break;
    std::vector<LaggedLink> removed;
    for (const auto& x : parents) {
      LaggedParentSet conds;
      for (const auto& c : parents) {
        if (static_cast<int>(conds.size()) == p) break;
        if (c != x) conds.insert(c);
      }
      const CiVerdict v = g_test(ds, CiQuery{x, target, conds, cfg.alpha_level}, range);
      strength[x] = std::min(strength[x], v.statistic);
      if (v.independent) removed.push_back(x);
    }
    std::erase_if(parents, [&](const LaggedLink& l) { return std::find(removed.begin(), removed.end(), l) != removed.end(); });
    std::sort(parents.begin(), parents.end(), [&](const LaggedLink& a, const LaggedLink& b) {
      const double sa = strength[a], sb = strength[b];
      return sa != sb ? sa > sb : a < b;
    });
  }
  return parents;
}

std::vector<LinkScore> momentary_links(const Dataset& ds, const DiscoveryConfig& cfg, TimeRange range, int target,
                                       const std::vector<std::vector<LaggedLink>>& selected) {
  const LaggedParentSet own(selected[static_cast<std::size_t>(target)]);
  std::vector<LinkScore> kept;
  for (int i = 0; i < ds.components(); ++i)
    for (int lag = 1; lag <= cfg.tau_ub; ++lag) {
      const LaggedLink x{i, lag};
      LaggedParentSet cond = own;
      const auto& source = selected[static_cast<std::size_t>(i)];
      const auto take = std::min<std::size_t>(source.size(), static_cast<std::size_t>(cfg.max_conds_px));
      for (std::size_t k = 0; k < take; ++k) cond.insert({source[k].component, source[k].lag + lag});
      cond.erase(x);
      const CiVerdict v = g_test(ds, CiQuery{x, target, cond, cfg.alpha_level}, range);
      if (!v.independent) kept.push_back({x, v.p_value, v.statistic});
    }
  return kept;
}

void rank(std::vector<LinkScore>& scores) {
  std::sort(scores.begin(), scores.end(), [](const LinkScore& a, const LinkScore& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    if (a.statistic != b.statistic) return a.statistic > b.statistic;
    return a.link < b.link;
  });
}

}  // namespace

ScoredGraph discover_interval_scored(const Dataset& ds, const DiscoveryConfig& cfg, TimeRange range) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(ds.components());
  std::vector<std::vector<LaggedLink>> selected(n);
  parallel_for(n, [&](std::size_t j) { selected[j] = select_conditions(ds, cfg, range, static_cast<int>(j)); });
  ScoredGraph out{ParentGraph(n), std::vector<std::vector<LinkScore>>(n)};
  parallel_for(n, [&](std::size_t j) {
    out.ranked[j] = momentary_links(ds, cfg, range, static_cast<int>(j), selected);
    rank(out.ranked[j]);
    for (const auto& s : out.ranked[j]) out.graph[j].insert(s.link);
  });
  return out;
}

ParentGraph discover_interval(const Dataset& ds, const DiscoveryConfig& cfg, TimeRange range) {
  return discover_interval_scored(ds, cfg, range).graph;
}

ScoredGraph discover_superset_scored(const Dataset& ds, const DiscoveryConfig& cfg) {
  cfg.validate();
  const int needed = min_interval_samples(cfg, ds.domain_size());
  const auto intervals = discovery_intervals(ds.length(), cfg);
  for (std::size_t k = 0; k < intervals.size(); ++k)
    if (intervals[k].size() < needed)
      throw DataError("discovery interval " + std::to_string(k) + " holds " + std::to_string(intervals[k].size()) +
                      " samples; at least " + std::to_string(needed) + " are needed per interval, i.e. length >= " +
                      std::to_string(cfg.tau_ub + static_cast<long>(needed) * cfg.n_intervals));
  const auto n = static_cast<std::size_t>(ds.components());
  std::vector<std::map<LaggedLink, LinkScore>> best(n);
  for (const auto& range : intervals) {
    const ScoredGraph part = discover_interval_scored(ds, cfg, range);
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& s : part.ranked[j]) {
        auto [it, inserted] = best[j].emplace(s.link, s);
        if (!inserted) {
          it->second.p_value = std::min(it->second.p_value, s.p_value);
          it->second.statistic = std::max(it->second.statistic, s.statistic);
        }
      }
  }
  ScoredGraph out{ParentGraph(n), std::vector<std::vector<LinkScore>>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& [link, s] : best[j]) {
      out.graph[j].insert(link);
      out.ranked[j].push_back(s);
    }
    rank(out.ranked[j]);
  }
  return out;
}

ParentGraph discover_superset(const Dataset& ds, const DiscoveryConfig& cfg) {
  return discover_superset_scored(ds, cfg).graph;
}

RefinedGraphs refine_after_split(const Dataset& ds, const ParentGraph& spa_hat, std::span<const double> split_times,
                                 const DiscoveryConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(ds.components());
  if (spa_hat.size() != n || split_times.size() != n)
    throw std::invalid_argument("refine_after_split: need one parent set and one split time per component");
  const int needed = min_interval_samples(cfg, ds.domain_size());

  RefinedGraphs out{spa_hat, spa_hat, std::vector<bool>(n, true), std::vector<bool>(n, true)};
  std::vector<char> pre_flag(n, 1), post_flag(n, 1);
  parallel_for(n, [&](std::size_t j) {
    const double split = split_times[j];
    if (std::isnan(split)) return;
    const int cut = static_cast<int>(std::ceil(split));
    const LaggedParentSet& parents = spa_hat[j];
    int max_lag = parents.max_lag();
    for (const auto& x : parents) max_lag = std::max(max_lag, x.lag + spa_hat[static_cast<std::size_t>(x.component)].max_lag());

    const TimeRange sides[2] = {{0, std::clamp(cut, 0, ds.length())}, {std::clamp(cut, 0, ds.length()), ds.length()}};
    for (int side = 0; side < 2; ++side) {
      const TimeRange range = sides[side];
      if (std::min(range.end, ds.length()) - std::max(range.begin, max_lag) < needed) continue;
      LaggedParentSet& target = side == 0 ? out.pre[j] : out.post[j];
      for (const auto& x : parents) {
        LaggedParentSet cond = parents | spa_hat[static_cast<std::size_t>(x.component)].shifted(x.lag);
        cond.erase(x);
        if (g_test(ds, CiQuery{x, static_cast<int>(j), cond, cfg.alpha_level}, range).independent) target.erase(x);
      }
      (side == 0 ? pre_flag : post_flag)[j] = 0;
    }
  });
  for (std::size_t j = 0; j < n; ++j) {
    out.pre_unpruned[j] = pre_flag[j] != 0;
    out.post_unpruned[j] = post_flag[j] != 0;
  }
  return out;
}

}  // namespace ccpd
