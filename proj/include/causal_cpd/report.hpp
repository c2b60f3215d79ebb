#ifndef CAUSAL_CPD_REPORT_HPP
#define CAUSAL_CPD_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/detector.hpp"
#include "causal_cpd/eval.hpp"

namespace ccpd {

/// "{X1(t-1), X2(t-2)}"
std::string format_parent_set(const LaggedParentSet& set, const std::vector<std::string>& names);

/// Rows of the per-component summary: component, projected change point
/// (with its time label when the data has one), parents before and after.
nlohmann::json detection_table_rows(const DetectionReport& report, const Dataset& ds);
/// Plain-text rendering of detection_table_rows.
std::string format_detection_table(const DetectionReport& report, const Dataset& ds);

/// CSV with columns setting,method,Q,accuracy,stderr.
std::string metrics_accuracy_csv(const MetricsReport& report);
/// CSV with columns setting,method,samples,failed,mean_error,stderr.
std::string metrics_error_csv(const MetricsReport& report);
std::string metrics_accuracy_svg(const MetricsReport& report);

/// CSV with columns i,t_mid,score.
std::string pe_series_csv(const PeSeries& series);

}  // namespace ccpd

#endif  // CAUSAL_CPD_REPORT_HPP
