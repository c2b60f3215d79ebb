#include "causal_cpd/detector.hpp"

#include <cmath>
#include <stdexcept>

#include "causal_cpd/parallel.hpp"
#include "causal_cpd/segments.hpp"

namespace ccpd {

void DetectorConfig::validate() const {
  discovery.validate();
  pe.validate();
  if (min_segment_length != 0 && min_segment_length < 2 * pe.n_w + 1)
    throw std::invalid_argument("min_segment_length must be >= 2 n_w + 1 (" + std::to_string(2 * pe.n_w + 1) + ")");
  if (score_threshold && !(std::isfinite(*score_threshold) && *score_threshold >= 0.0))
    throw std::invalid_argument("score threshold must be a finite non-negative number");
  if (max_segment_parents < -1) throw std::invalid_argument("max_segment_parents must be -1, 0 or positive");
}

int DetectorConfig::resolved_segment_parents(int length, int domain_size) const {
  if (max_segment_parents >= 0) return max_segment_parents;
  const double budget = static_cast<double>(length - discovery.tau_ub) / (8.0 * pe.n_w);
  int k = 0;
  double configs = domain_size;
  while (configs <= budget) {
    ++k;
    configs *= domain_size;
  }
  return std::max(k, 1);
}

ArgmaxResult argmax_with_ties(const std::map<int, PeSeries>& series) {
  ArgmaxResult best;
  bool found = false;
  for (const auto& [config, s] : series)
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      const double v = s.scores[i];
      if (std::isnan(v)) continue;
      if (!found || v > best.score) {
        best = {config, static_cast<int>(i), v};
        found = true;
      }
    }
  if (!found) throw std::invalid_argument("argmax over empty divergence series");
  return best;
}

namespace {

ComponentDetection detect_component(const Dataset& ds, const LaggedParentSet& discovered,
                                    const std::vector<LinkScore>* ranked, int j, const DetectorConfig& cfg) {
  ComponentDetection out;
  out.component = j;
  out.spa_discovered = discovered;
  out.spa = discovered;
  const int cap = ranked ? cfg.resolved_segment_parents(ds.length(), ds.domain_size()) : 0;
  if (cap > 0 && static_cast<int>(discovered.size()) > cap) {
    out.spa = LaggedParentSet();
    for (int k = 0; k < cap; ++k) out.spa.insert((*ranked)[static_cast<std::size_t>(k)].link);
    out.spa_capped = true;
  }
  if (out.spa.empty()) {
    out.spa.insert({j, 1});
    out.spa_fallback = true;
  }

  const auto segments = build_segments(ds, out.spa, j, out.spa.max_lag());
  const int min_len = cfg.resolved_min_segment_length();
  std::vector<const Segment*> usable;
  for (const auto& seg : segments) {
    if (seg.length() >= min_len)
      usable.push_back(&seg);
    else
      out.skipped.push_back({seg.config_index, seg.length(),
                             seg.empty() ? "empty" : "shorter than " + std::to_string(min_len)});
  }
  if (usable.empty()) {
    out.no_detection_reason = "every segment is shorter than " + std::to_string(min_len);
    return out;
  }

  std::vector<PeSeries> computed(usable.size());
  parallel_for(usable.size(), [&](std::size_t k) { computed[k] = pe_series(*usable[k], ds.domain_size(), cfg.pe); });
  for (std::size_t k = 0; k < usable.size(); ++k) out.series.emplace(usable[k]->config_index, std::move(computed[k]));

  const ArgmaxResult best = argmax_with_ties(out.series);
  const Segment& seg = segments[static_cast<std::size_t>(best.config_index)];
  const int pos_a = best.window_index * cfg.pe.n_st + cfg.pe.n_w - 1;
  out.detected = true;
  out.winning_config = best.config_index;
  out.window_index = best.window_index;
  out.change_position = pos_a + 1;
  out.t_before = seg.time_indices[static_cast<std::size_t>(pos_a)];
  out.t_after = seg.time_indices[static_cast<std::size_t>(pos_a + 1)];
  out.projected_time = 0.5 * (out.t_before + out.t_after);
  out.peak_score = best.score;
  out.infinite_score = std::isinf(best.score);
  out.significant = best.score > 0.0 && (!cfg.score_threshold || best.score >= *cfg.score_threshold);
  return out;
}

DetectionReport run(const Dataset& ds, const ParentGraph& spa, const std::vector<std::vector<LinkScore>>* ranked,
                    const DetectorConfig& cfg, bool oracle) {
  cfg.validate();
  if (static_cast<int>(spa.size()) != ds.components())
    throw std::invalid_argument("parent graph has " + std::to_string(spa.size()) + " components, data has " +
                                std::to_string(ds.components()));
  DetectionReport report;
  report.spa_hat = spa;
  report.oracle_parents = oracle;
  report.components.resize(static_cast<std::size_t>(ds.components()));
  parallel_for(report.components.size(), [&](std::size_t j) {
    report.components[j] = detect_component(ds, spa[j], ranked ? &(*ranked)[j] : nullptr, static_cast<int>(j), cfg);
  });

  if (cfg.refine) {
    ParentGraph used(report.components.size());
    std::vector<double> splits(report.components.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < report.components.size(); ++j) {
      const auto& c = report.components[j];
      used[j] = c.spa_fallback ? c.spa : c.spa_discovered;
      if (report.components[j].detected) splits[j] = report.components[j].projected_time;
    }
    const RefinedGraphs refined = refine_after_split(ds, used, splits, cfg.discovery);
    for (std::size_t j = 0; j < report.components.size(); ++j) {
      auto& c = report.components[j];
      c.parents_pre = refined.pre[j];
      c.parents_post = refined.post[j];
      c.pre_unpruned = refined.pre_unpruned[j];
      c.post_unpruned = refined.post_unpruned[j];
    }
  }
  return report;
}

}  // namespace

DetectionReport detect(const Dataset& ds, const DetectorConfig& cfg) {
  cfg.validate();
  const ScoredGraph found = discover_superset_scored(ds, cfg.discovery);
  return run(ds, found.graph, &found.ranked, cfg, false);
}

DetectionReport detect_with_parents(const Dataset& ds, const ParentGraph& spa, const DetectorConfig& cfg) {
  for (const auto& set : spa)
    for (const auto& l : set)
      if (l.component < 0 || l.component >= ds.components() || l.lag < 1)
        throw std::invalid_argument("parent graph references an invalid lagged variable");
  return run(ds, spa, nullptr, cfg, true);
}

}  // namespace ccpd
