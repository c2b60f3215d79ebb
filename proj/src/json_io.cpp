#include "causal_cpd/json_io.hpp"

#include <cmath>
#include <stdexcept>

#include "causal_cpd/error.hpp"

namespace ccpd {

using nlohmann::json;

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return static_cast<int>(k);
  throw DataError("unknown component '" + name + "'");
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json indexed_links(const LaggedParentSet& set) {
  json out = json::array();
  for (const auto& l : set) out.push_back({l.component, l.lag});
  return out;
}

LaggedParentSet indexed_links_from(const json& j) {
  LaggedParentSet set;
  for (const auto& link : j) set.insert({link.at(0).get<int>(), link.at(1).get<int>()});
  return set;
}

json mechanism_to_json(const RegimeMechanism& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.cpt.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cpt.cols(); ++c) row.push_back(m.cpt(r, c));
    rows.push_back(std::move(row));
  }
  return {{"parents", indexed_links(m.parents)}, {"cpt", std::move(rows)}};
}

RegimeMechanism mechanism_from_json(const json& j) {
  RegimeMechanism m;
  m.parents = indexed_links_from(j.at("parents"));
  const auto& rows = j.at("cpt");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.at(0).size());
  m.cpt.resize(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const auto& row = rows.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != n_cols) throw DataError("ragged conditional table");
    for (Eigen::Index c = 0; c < n_cols; ++c) m.cpt(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

json parent_set_to_json(const LaggedParentSet& set, const std::vector<std::string>& names) {
  json out = json::array();
  for (const auto& l : set) out.push_back({names.at(static_cast<std::size_t>(l.component)), l.lag});
  return out;
}

json parent_graph_to_json(const ParentGraph& graph, const std::vector<std::string>& names) {
  json out = json::object();
  for (std::size_t j = 0; j < graph.size(); ++j) out[names.at(j)] = parent_set_to_json(graph[j], names);
  return out;
}

ParentGraph parent_graph_from_json(const json& j, const std::vector<std::string>& names) {
  if (!j.is_object()) throw DataError("parent graph must be a JSON object");
  ParentGraph graph(names.size());
  try {
    for (const auto& [child, links] : j.items()) {
      auto& set = graph[static_cast<std::size_t>(index_of(names, child))];
      for (const auto& link : links) {
        if (!link.is_array() || link.size() != 2) throw DataError("parent link must be [name, lag]");
        const int lag = link.at(1).get<int>();
        if (lag < 1) throw DataError("parent lag must be >= 1");
        set.insert({index_of(names, link.at(0).get<std::string>()), lag});
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed parent graph: ") + e.what());
  }
  return graph;
}

json spec_to_json(const ScmSpec& spec) {
  json mechanisms = json::array();
  for (int j = 0; j < spec.n; ++j) {
    const auto& r = spec.regimes[static_cast<std::size_t>(j)];
    mechanisms.push_back({{"component", j},
                          {"change_kind", to_string(spec.change_kind[static_cast<std::size_t>(j)])},
                          {"pre", mechanism_to_json(r[0])},
                          {"post", mechanism_to_json(r[1])}});
  }
  const EdgeArray edges = EdgeArray::from_spec(spec);
  json edge_array = json::array();
  for (int p = 0; p < spec.n; ++p) {
    json by_regime = json::array();
    for (int regime = 0; regime < 2; ++regime) {
      json by_child = json::array();
      for (int c = 0; c < spec.n; ++c) {
        json by_lag = json::array();
        for (int lag = 0; lag <= spec.tau_max; ++lag) by_lag.push_back(edges.at(p, regime, c, lag) ? 1 : 0);
        by_child.push_back(std::move(by_lag));
      }
      by_regime.push_back(std::move(by_child));
    }
    edge_array.push_back(std::move(by_regime));
  }
  const GroundTruth truth = ground_truth(spec);
  const auto names = default_component_names(spec.n);
  return {{"n", spec.n},
          {"length", spec.length},
          {"tau_max", spec.tau_max},
          {"domain", spec.domain.symbols()},
          {"change_points", spec.change_points},
          {"seed", spec.seed},
          {"margin", spec.margin},
          {"min_divergence", spec.min_divergence},
          {"alpha", spec.alpha},
          {"mechanisms", std::move(mechanisms)},
          {"edge_array", std::move(edge_array)},
          {"ground_truth",
           {{"change_points", truth.change_points},
            {"pre_parents", parent_graph_to_json(truth.pre_parents, names)},
            {"post_parents", parent_graph_to_json(truth.post_parents, names)},
            {"union_parents", parent_graph_to_json(truth.union_parents, names)}}}};
}

ScmSpec spec_from_json(const json& j) {
  ScmSpec spec;
  try {
    spec.n = j.at("n").get<int>();
    spec.length = j.at("length").get<int>();
    spec.tau_max = j.at("tau_max").get<int>();
    spec.domain = Domain(j.at("domain").get<std::vector<int>>());
    spec.change_points = j.at("change_points").get<std::vector<int>>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.margin = j.value("margin", 0);
    spec.min_divergence = j.value("min_divergence", 0.0);
    spec.alpha = j.value("alpha", 0.1);
    const auto& mechanisms = j.at("mechanisms");
    if (static_cast<int>(mechanisms.size()) != spec.n) throw DataError("spec needs one mechanism entry per component");
    spec.regimes.resize(static_cast<std::size_t>(spec.n));
    spec.change_kind.resize(static_cast<std::size_t>(spec.n));
    for (const auto& m : mechanisms) {
      const int c = m.at("component").get<int>();
      if (c < 0 || c >= spec.n) throw DataError("mechanism component out of range");
      spec.regimes[static_cast<std::size_t>(c)] = {mechanism_from_json(m.at("pre")), mechanism_from_json(m.at("post"))};
      spec.change_kind[static_cast<std::size_t>(c)] = parse_change_kind(m.at("change_kind").get<std::string>());
    }
    spec.validate(true);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid spec: ") + e.what());
  }
  return spec;
}

json report_to_json(const DetectionReport& report, const Dataset& ds, bool include_series) {
  const auto& names = ds.component_names();
  json components = json::array();
  for (const auto& c : report.components) {
    json entry = {{"component", names.at(static_cast<std::size_t>(c.component))},
                  {"spa", parent_set_to_json(c.spa, names)},
                  {"spa_fallback", c.spa_fallback},
                  {"spa_discovered", parent_set_to_json(c.spa_discovered, names)},
                  {"spa_capped", c.spa_capped},
                  {"detected", c.detected}};
    if (c.detected) {
      entry["winning_config"] = c.winning_config;
      entry["window_index"] = c.window_index;
      entry["change_position"] = c.change_position;
      entry["t_before"] = c.t_before;
      entry["t_after"] = c.t_after;
      entry["projected_time"] = c.projected_time;
      if (ds.has_time_labels()) {
        entry["label_before"] = ds.time_labels().at(static_cast<std::size_t>(c.t_before));
        entry["label_after"] = ds.time_labels().at(static_cast<std::size_t>(c.t_after));
      }
      entry["peak_score"] = number_or_null(c.peak_score);
      entry["infinite_score"] = c.infinite_score;
      entry["significant"] = c.significant;
    } else {
      entry["no_detection_reason"] = c.no_detection_reason;
    }
    json skipped = json::array();
    for (const auto& s : c.skipped) skipped.push_back({{"config", s.config_index}, {"length", s.length}, {"reason", s.reason}});
    entry["skipped_segments"] = std::move(skipped);
    if (c.parents_pre) {
      entry["parents_pre"] = parent_set_to_json(*c.parents_pre, names);
      entry["parents_post"] = parent_set_to_json(*c.parents_post, names);
      entry["pre_unpruned"] = c.pre_unpruned;
      entry["post_unpruned"] = c.post_unpruned;
    }
    if (include_series) {
      json series = json::object();
      for (const auto& [config, s] : c.series) {
        json scores = json::array();
        for (double v : s.scores) scores.push_back(number_or_null(v));
        series[std::to_string(config)] = {{"too_short", s.too_short}, {"scores", std::move(scores)}};
      }
      entry["pe_series"] = std::move(series);
    }
    components.push_back(std::move(entry));
  }
  return {{"oracle_parents", report.oracle_parents},
          {"spa_hat", parent_graph_to_json(report.spa_hat, names)},
          {"components", std::move(components)}};
}

json trial_record_to_json(const TrialRecord& r, bool include_timing) {
  json out = {{"trial", r.trial},       {"trial_seed", r.trial_seed},   {"method", r.method},
              {"component", r.component}, {"true_change", r.true_change}, {"failed", r.failed}};
  if (r.failed) {
    out["message"] = r.message;
  } else {
    out["estimate"] = r.estimate;
    out["error"] = r.error;
  }
  if (include_timing) out["seconds"] = r.seconds;
  return out;
}

json metrics_to_json(const MetricsReport& report, bool include_timing) {
  json methods = json::array();
  for (const auto& m : report.methods) {
    json entry = {{"method", m.method},
                  {"samples", m.samples},
                  {"failed", m.failed},
                  {"mean_error", m.mean_error},
                  {"stderr_error", m.stderr_error},
                  {"accuracy", m.accuracy},
                  {"accuracy_stderr", m.accuracy_stderr}};
    if (include_timing) entry["mean_seconds"] = m.mean_seconds;
    methods.push_back(std::move(entry));
  }
  return {{"setting", report.setting}, {"length", report.length}, {"q_grid", report.q_grid}, {"methods", std::move(methods)}};
}

}  // namespace ccpd
