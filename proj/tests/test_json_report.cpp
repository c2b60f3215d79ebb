#include <gtest/gtest.h>

#include "causal_cpd/error.hpp"
#include "causal_cpd/json_io.hpp"
#include "causal_cpd/report.hpp"
#include "causal_cpd/svg.hpp"
#include "test_support.hpp"

using namespace ccpd;

namespace {

void expect_same_spec(const ScmSpec& a, const ScmSpec& b) {
  EXPECT_EQ(a.n, b.n);
  EXPECT_EQ(a.length, b.length);
  EXPECT_EQ(a.tau_max, b.tau_max);
  EXPECT_EQ(a.domain, b.domain);
  EXPECT_EQ(a.change_points, b.change_points);
  EXPECT_EQ(a.change_kind, b.change_kind);
  EXPECT_EQ(a.seed, b.seed);
  for (std::size_t j = 0; j < a.regimes.size(); ++j)
    for (int r = 0; r < 2; ++r) {
      EXPECT_EQ(a.regimes[j][static_cast<std::size_t>(r)].parents, b.regimes[j][static_cast<std::size_t>(r)].parents);
      EXPECT_EQ(a.regimes[j][static_cast<std::size_t>(r)].cpt, b.regimes[j][static_cast<std::size_t>(r)].cpt);
    }
}

}  // namespace

TEST(SpecJson, RoundTripsExactly) {
  for (auto kind : {ChangeKind::soft, ChangeKind::hard}) {
    GeneratorOptions g;
    g.seed = 3;
    g.kind = kind;
    const ScmSpec spec = random_spec(g);
    const nlohmann::json j = spec_to_json(spec);
    const ScmSpec back = spec_from_json(nlohmann::json::parse(j.dump()));
    expect_same_spec(spec, back);
    EXPECT_EQ(simulate(spec).data, simulate(back).data);
    EXPECT_EQ(j["edge_array"].size(), 3u);
    EXPECT_EQ(j["edge_array"][0].size(), 2u);
    EXPECT_EQ(j["edge_array"][0][0][0].size(), 5u);
  }
}

TEST(SpecJson, MalformedInputIsADataError) {
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"n": 2})")), DataError);
  GeneratorOptions g;
  nlohmann::json j = spec_to_json(random_spec(g));
  j["change_points"][0] = 1;
  EXPECT_THROW(spec_from_json(j), DataError);
}

TEST(ParentGraphJson, RoundTripsByName) {
  const std::vector<std::string> names{"A", "B"};
  const ParentGraph g{LaggedParentSet{{0, 1}, {1, 3}}, LaggedParentSet{}};
  const nlohmann::json j = parent_graph_to_json(g, names);
  EXPECT_EQ(j["A"][1][0], "B");
  EXPECT_EQ(j["A"][1][1], 3);
  EXPECT_EQ(parent_graph_from_json(j, names), g);
  EXPECT_THROW(parent_graph_from_json(nlohmann::json::parse(R"({"A": [["C", 1]]})"), names), DataError);
  EXPECT_THROW(parent_graph_from_json(nlohmann::json::parse(R"({"A": [["B", 0]]})"), names), DataError);
}

TEST(ReportJson, CarriesDetectionFields) {
  GeneratorOptions g;
  g.seed = 4;
  const Simulation sim = simulate(random_spec(g));
  DetectorConfig cfg;
  cfg.refine = true;
  const DetectionReport r = detect(sim.data, cfg);
  const nlohmann::json j = report_to_json(r, sim.data);
  ASSERT_EQ(j["components"].size(), 3u);
  const auto& c = j["components"][0];
  EXPECT_EQ(c["component"], "X1");
  EXPECT_DOUBLE_EQ(c["projected_time"].get<double>(), r.components[0].projected_time);
  EXPECT_TRUE(c.contains("parents_pre"));
  EXPECT_TRUE(c.contains("pe_series"));
  EXPECT_FALSE(report_to_json(r, sim.data, false)["components"][0].contains("pe_series"));
}

TEST(Metrics, JsonOmitsTimingUnlessAsked) {
  TrialRecord rec;
  rec.method = "oracle";
  rec.seconds = 1.5;
  EXPECT_FALSE(trial_record_to_json(rec).contains("seconds"));
  EXPECT_TRUE(trial_record_to_json(rec, true).contains("seconds"));
  const MetricsReport m = aggregate({rec}, {10, 20}, 100, "s");
  EXPECT_FALSE(metrics_to_json(m)["methods"][0].contains("mean_seconds"));
}

TEST(Metrics, CsvLayout) {
  TrialRecord a, b;
  a.method = b.method = "m";
  a.true_change = 100;
  a.estimate = 105;
  b.true_change = 100;
  b.estimate = 400;
  a.error = 0.005;
  b.error = 0.3;
  b.component = 1;
  const MetricsReport m = aggregate({a, b}, {10, 500}, 1000, "demo");
  EXPECT_EQ(metrics_accuracy_csv(m), "setting,method,Q,accuracy,stderr\ndemo,m,10,0.5,0.5\ndemo,m,500,1,0\n");
  EXPECT_EQ(metrics_error_csv(m).rfind("setting,method,samples,failed,mean_error,stderr\n", 0), 0u);
  EXPECT_NE(metrics_error_csv(m).find("demo,m,2,0,0.1525,"), std::string::npos);
  const std::string svg = metrics_accuracy_svg(m);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST(Table, FormatsParentsAndChangePoints) {
  EXPECT_EQ(format_parent_set(LaggedParentSet{{1, 2}, {0, 1}}, {"X1", "X2"}), "{X1(t-1), X2(t-2)}");
  EXPECT_EQ(format_parent_set(LaggedParentSet{}, {"X1"}), "{}");

  DetectionReport r;
  ComponentDetection c;
  c.detected = true;
  c.projected_time = 1600;
  c.t_before = 1599;
  c.t_after = 1601;
  c.spa = LaggedParentSet{{0, 1}};
  c.parents_pre = LaggedParentSet{{0, 1}};
  c.parents_post = LaggedParentSet{};
  r.components.push_back(c);
  ComponentDetection d;
  d.component = 1;
  d.no_detection_reason = "all segments too short";
  r.components.push_back(d);
  std::vector<std::string> labels;
  for (int t = 0; t < 2000; ++t) labels.push_back("d" + std::to_string(t));
  const Dataset ds(CodeMatrix::Zero(2, 2000), Domain::binary(), {"PM10", "CO"}, labels);
  const std::string table = format_detection_table(r, ds);
  EXPECT_NE(table.find("component"), std::string::npos);
  EXPECT_NE(table.find("1600 (d1601)"), std::string::npos);
  EXPECT_NE(table.find("{PM10(t-1)}"), std::string::npos);
  EXPECT_NE(table.find("none"), std::string::npos);
  r.components[0].significant = false;
  EXPECT_NE(format_detection_table(r, ds).find("[no significant change]"), std::string::npos);
}

TEST(Svg, EscapesTextAndDrawsEverySeries) {
  const std::string doc =
      svg::line_chart("a < b & c", "x", "y", {{"one", {0, 1, 2}, {0, 1, 0}}, {"two", {0, 1}, {1, 1}}});
  EXPECT_NE(doc.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_EQ(doc.find("a < b"), std::string::npos);
  std::size_t lines = 0;
  for (auto pos = doc.find("<polyline"); pos != std::string::npos; pos = doc.find("<polyline", pos + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
  EXPECT_NE(doc.find("</svg>"), std::string::npos);
}

TEST(PeCsv, UsesWindowMidpoints) {
  PeSeries s;
  s.scores = {0.25, 0.5};
  s.spans = {{0, 4, 5, 9}, {1, 5, 7, 10}};
  EXPECT_EQ(pe_series_csv(s), "i,t_mid,score\n0,4.5,0.25\n1,6,0.5\n");
}
