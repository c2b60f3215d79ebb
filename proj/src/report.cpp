#include "causal_cpd/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

#include "causal_cpd/svg.hpp"

namespace ccpd {

namespace {

// Shortest round-trip rendering of a double.
std::string fmt(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

}  // namespace

std::string format_parent_set(const LaggedParentSet& set, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (const auto& l : set) {
    out += (first ? "" : ", ") + names.at(static_cast<std::size_t>(l.component)) + "(t-" + std::to_string(l.lag) + ")";
    first = false;
  }
  return out + "}";
}

nlohmann::json detection_table_rows(const DetectionReport& report, const Dataset& ds) {
  const auto& names = ds.component_names();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : report.components) {
    nlohmann::json row = {{"component", names.at(static_cast<std::size_t>(c.component))}};
    if (c.detected) {
      row["change_point"] = c.projected_time;
      if (ds.has_time_labels()) row["change_label"] = ds.time_labels().at(static_cast<std::size_t>(c.t_after));
      row["significant"] = c.significant;
    } else {
      row["change_point"] = nullptr;
      row["note"] = c.no_detection_reason;
    }
    row["parents_pre"] = format_parent_set(c.parents_pre.value_or(c.spa), names);
    row["parents_post"] = format_parent_set(c.parents_post.value_or(c.spa), names);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_detection_table(const DetectionReport& report, const Dataset& ds) {
  const nlohmann::json rows = detection_table_rows(report, ds);
  std::vector<std::array<std::string, 4>> cells = {{"component", "change point", "parents before", "parents after"}};
  for (const auto& row : rows) {
    std::string cp = "none";
    if (!row["change_point"].is_null()) {
      cp = fmt(row["change_point"].get<double>());
      if (row.contains("change_label")) cp += " (" + row["change_label"].get<std::string>() + ")";
      if (!row["significant"].get<bool>()) cp += " [no significant change]";
    }
    cells.push_back({row["component"].get<std::string>(), cp, row["parents_pre"].get<std::string>(),
                     row["parents_post"].get<std::string>()});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& r : cells)
    for (std::size_t k = 0; k < 4; ++k) width[k] = std::max(width[k], r[k].size());
  std::ostringstream out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      out << cells[i][k];
      if (k < 3) out << std::string(width[k] - cells[i][k].size() + 2, ' ');
    }
    out << '\n';
    if (i == 0) {
      for (std::size_t k = 0; k < 4; ++k) out << std::string(width[k], '-') << (k < 3 ? "  " : "");
      out << '\n';
    }
  }
  return out.str();
}

std::string metrics_accuracy_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "setting,method,Q,accuracy,stderr\n";
  for (const auto& m : report.methods)
    for (std::size_t k = 0; k < report.q_grid.size(); ++k)
      out << report.setting << ',' << m.method << ',' << fmt(report.q_grid[k]) << ',' << fmt(m.accuracy[k]) << ','
          << fmt(m.accuracy_stderr[k]) << '\n';
  return out.str();
}

std::string metrics_error_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "setting,method,samples,failed,mean_error,stderr\n";
  for (const auto& m : report.methods)
    out << report.setting << ',' << m.method << ',' << m.samples << ',' << m.failed << ',' << fmt(m.mean_error) << ','
        << fmt(m.stderr_error) << '\n';
  return out.str();
}

std::string metrics_accuracy_svg(const MetricsReport& report) {
  std::vector<svg::Series> series;
  for (const auto& m : report.methods) series.push_back({m.method, report.q_grid, m.accuracy});
  return svg::line_chart("Accuracy vs Q (" + report.setting + ", T=" + std::to_string(report.length) + ")", "Q",
                         "accuracy", series);
}

std::string pe_series_csv(const PeSeries& series) {
  std::ostringstream out;
  out << "i,t_mid,score\n";
  for (std::size_t i = 0; i < series.scores.size(); ++i) {
    const auto& sp = series.spans[i];
    out << i << ',' << fmt(0.5 * (sp.first_end + sp.second_begin)) << ',' << fmt(series.scores[i]) << '\n';
  }
  return out.str();
}

}  // namespace ccpd
