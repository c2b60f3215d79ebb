#ifndef CAUSAL_CPD_JSON_IO_HPP
#define CAUSAL_CPD_JSON_IO_HPP

#include <vector>

#include <json.hpp>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/detector.hpp"
#include "causal_cpd/eval.hpp"
#include "causal_cpd/lagged_parents.hpp"
#include "causal_cpd/scm_gen.hpp"

namespace ccpd {

/// {"X1": [["X1",1],["X2",2]], ...}
nlohmann::json parent_graph_to_json(const ParentGraph& graph, const std::vector<std::string>& names);
/// Inverse of parent_graph_to_json; throws DataError on unknown names.
ParentGraph parent_graph_from_json(const nlohmann::json& j, const std::vector<std::string>& names);

nlohmann::json parent_set_to_json(const LaggedParentSet& set, const std::vector<std::string>& names);

/// Spec plus ground truth; edge array in [n, 2, n, tau_max+1] layout.
nlohmann::json spec_to_json(const ScmSpec& spec);
ScmSpec spec_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const DetectionReport& report, const Dataset& ds, bool include_series = true);
/// Wall-clock fields are left out unless include_timing is set, so repeated
/// runs serialize identically.
nlohmann::json trial_record_to_json(const TrialRecord& record, bool include_timing = false);
nlohmann::json metrics_to_json(const MetricsReport& report, bool include_timing = false);

}  // namespace ccpd

#endif  // CAUSAL_CPD_JSON_IO_HPP
