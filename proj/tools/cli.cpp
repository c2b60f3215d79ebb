#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/detector.hpp"
#include "causal_cpd/error.hpp"
#include "causal_cpd/eval.hpp"
#include "causal_cpd/file_util.hpp"
#include "causal_cpd/json_io.hpp"
#include "causal_cpd/parallel.hpp"
#include "causal_cpd/pcmci.hpp"
#include "causal_cpd/report.hpp"
#include "causal_cpd/rng.hpp"
#include "causal_cpd/rulsif.hpp"
#include "causal_cpd/scm_gen.hpp"
#include "causal_cpd/segments.hpp"
#include "causal_cpd/svg.hpp"

namespace ccpd::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using clock = std::chrono::steady_clock;

constexpr const char* kVersion = "1.0.0";

const std::vector<std::string> kSubcommands = {"generate", "discover", "detect", "pe", "evaluate"};

json to_json(const std::string& v) { return v; }
json to_json(bool v) { return v; }
json to_json(int v) { return v; }
json to_json(double v) { return v; }
json to_json(std::uint64_t v) { return v; }

// Options of one subcommand plus readers of their resolved values, so the
// manifest can record every setting including untouched defaults.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& value, const std::string& help) {
    readers_.emplace_back(name, [&value] { return to_json(value); });
    return app_->add_option("--" + name, value, help);
  }

  CLI::Option* flag(const std::string& name, bool& value, const std::string& help) {
    readers_.emplace_back(name, [&value] { return to_json(value); });
    return app_->add_flag("--" + name, value, help);
  }

  json resolved() const {
    json out = json::object();
    for (const auto& [name, read] : readers_) out[name] = read();
    return out;
  }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<json()>>> readers_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw std::invalid_argument(what + ": '" + text + "' is not a number");
  return v;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const double v = parse_double(item, what);
    if (v != std::floor(v)) throw std::invalid_argument(what + ": '" + item + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string digest_path(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.filename().string() + '\n' + fnv1a64_hex(read_file(f)) + '\n';
    return fnv1a64_hex(all);
  }
  return fnv1a64_hex(read_file(path));
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) out += (out.empty() ? "" : ",") + config_value(item);
    return out;
  }
  return v.dump();
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct DataOptions {
  std::string in;
  std::string header = "auto";
  bool time_labels = false;
  std::string domain;

  void add(Options& o) {
    o.add("in", in, "Input CSV (rows are time steps, columns are components)")->required();
    o.add("header", header, "Header row: auto, yes or no")->check(CLI::IsMember({"auto", "yes", "no"}));
    o.flag("time-labels", time_labels, "First column holds time labels");
    o.add("domain", domain, "Comma-separated symbol list (default: sidecar or inferred)");
  }

  Dataset load() const {
    ColumnSchema schema;
    schema.header = header == "yes" ? HeaderMode::present : header == "no" ? HeaderMode::absent : HeaderMode::automatic;
    schema.time_labels = time_labels;
    if (!domain.empty()) schema.domain = Domain(parse_int_list(domain, "--domain"));
    return load_csv(in, schema);
  }
};

struct DetectorOptions {
  int tau_ub = 5;
  double ci_alpha = 0.01;
  int n_intervals = 2;
  int pc_max_conds = 3;
  int max_conds_px = 3;
  int nw = 50;
  int nst = 1;
  double alpha = 0.1;
  std::string estimator = "plugin";
  double sigma = 0.0;
  double lambda = 0.01;
  int max_centers = 100;
  bool cv = false;
  int min_segment_length = 0;
  bool refine = false;
  double score_threshold = -1.0;
  int max_segment_parents = -1;

  void add(Options& o, bool with_refine) {
    o.add("tau-ub", tau_ub, "Largest lag searched by discovery");
    o.add("ci-alpha", ci_alpha, "Significance level of the independence tests");
    o.add("n-intervals", n_intervals, "Discovery runs on this many consecutive intervals");
    o.add("pc-max-conds", pc_max_conds, "Largest conditioning set in the selection phase");
    o.add("max-conds-px", max_conds_px, "Source parents added to momentary tests");
    o.add("nw", nw, "Samples per window half");
    o.add("nst", nst, "Window stride");
    o.add("alpha", alpha, "Relative divergence mixing parameter");
    o.add("estimator", estimator, "plugin or kernel")->check(CLI::IsMember({"plugin", "kernel"}));
    o.add("sigma", sigma, "Kernel width (0: median heuristic)");
    o.add("lambda", lambda, "Kernel ridge parameter");
    o.add("max-centers", max_centers, "Kernel centers per window");
    o.flag("cv", cv, "Cross-validate kernel width and ridge parameter");
    o.add("min-segment-length", min_segment_length, "Skip shorter segments (0: 2 nw + 1)");
    o.add("max-segment-parents", max_segment_parents,
          "Strongest discovered parents used for segmentation (-1: sized to the data, 0: all)");
    if (with_refine) o.flag("refine", refine, "Prune parents separately before and after the change");
    o.add("score-threshold", score_threshold, "Peaks below this are not significant (negative: off)");
  }

  DetectorConfig build() const {
    DetectorConfig cfg;
    cfg.discovery.tau_ub = tau_ub;
    cfg.discovery.alpha_level = ci_alpha;
    cfg.discovery.n_intervals = n_intervals;
    cfg.discovery.pc_max_conds = pc_max_conds;
    cfg.discovery.max_conds_px = max_conds_px;
    cfg.pe.n_w = nw;
    cfg.pe.n_st = nst;
    cfg.pe.alpha = alpha;
    cfg.pe.estimator = parse_estimator(estimator);
    cfg.pe.kernel.sigma = sigma;
    cfg.pe.kernel.lambda = lambda;
    cfg.pe.kernel.max_centers = max_centers;
    cfg.pe.kernel.cross_validate = cv;
    cfg.min_segment_length = min_segment_length;
    cfg.refine = refine;
    cfg.max_segment_parents = max_segment_parents;
    if (score_threshold >= 0.0) cfg.score_threshold = score_threshold;
    cfg.validate();
    return cfg;
  }
};

struct GeneratorCliOptions {
  int n = 3;
  int t = 6000;
  int tau_max = 4;
  int spa = 3;
  std::string kind = "soft";
  int domain_size = 2;
  int margin = -1;
  double min_divergence = 0.02;
  double divergence_alpha = 0.1;
  int max_attempts = 200000;

  void add(Options& o) {
    o.add("n", n, "Number of components");
    o.add("t", t, "Series length");
    o.add("tau-max", tau_max, "Largest parent lag");
    o.add("spa", spa, "Union parent set size per component");
    o.add("kind", kind, "soft or hard")->check(CLI::IsMember({"soft", "hard"}));
    o.add("domain-size", domain_size, "Symbols 0..s-1");
    o.add("margin", margin, "Change points avoid the first and last margin steps (-1: t/5)");
    o.add("min-divergence", min_divergence, "Smallest accepted pre/post divergence");
    o.add("divergence-alpha", divergence_alpha, "Mixing parameter of the divergence bound");
    o.add("max-attempts", max_attempts, "Table redraws before giving up");
  }

  GeneratorOptions build(std::uint64_t seed) const {
    if (domain_size < 2) throw std::invalid_argument("--domain-size must be >= 2");
    GeneratorOptions g;
    g.n = n;
    g.length = t;
    g.tau_max = tau_max;
    std::vector<int> symbols(static_cast<std::size_t>(domain_size));
    for (int k = 0; k < domain_size; ++k) symbols[static_cast<std::size_t>(k)] = k;
    g.domain = Domain(symbols);
    g.spa_size = spa;
    g.kind = parse_change_kind(kind);
    g.margin = margin;
    g.min_divergence = min_divergence;
    g.alpha = divergence_alpha;
    g.max_attempts = max_attempts;
    g.seed = seed;
    return g;
  }
};

struct RunContext {
  std::string subcommand;
  json config;
  json seeds = json::object();
  json inputs = json::object();
  json outputs = json::array();
  bool json_output = false;
  clock::time_point start = clock::now();

  void input(const fs::path& p) { inputs[p.string()] = digest_path(p); }
  void write(const fs::path& p, std::string_view contents) {
    write_file_atomic(p, contents);
    outputs.push_back(p.string());
  }
};

void write_manifest(RunContext& ctx, const fs::path& path) {
  json manifest = {{"tool", "causal-cpd"},
                   {"version", kVersion},
                   {"subcommand", ctx.subcommand},
                   {"config", ctx.config},
                   {"seeds", ctx.seeds},
                   {"inputs", ctx.inputs},
                   {"outputs", ctx.outputs},
                   {"threads", thread_count()},
                   {"timing", {{"seconds", std::chrono::duration<double>(clock::now() - ctx.start).count()}}}};
  write_file_atomic(path, manifest.dump(2) + "\n");
}

fs::path manifest_path(const std::string& flag, const fs::path& primary, const std::string& subcommand) {
  if (!flag.empty()) return flag;
  if (!primary.empty()) {
    fs::path p = primary;
    p += ".manifest.json";
    return p;
  }
  return subcommand + ".manifest.json";
}

std::string parents_table(const ParentGraph& graph, const std::vector<std::string>& names) {
  std::ostringstream out;
  std::size_t width = 9;
  for (const auto& n : names) width = std::max(width, n.size());
  out << "component" << std::string(width - 9 + 2, ' ') << "parents\n";
  for (std::size_t j = 0; j < graph.size(); ++j)
    out << names[j] << std::string(width - names[j].size() + 2, ' ') << format_parent_set(graph[j], names) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  GeneratorCliOptions gen;
  std::uint64_t seed = 0;
  std::string out;
  std::string spec_out;
};

void run_generate(const GenerateArgs& a, RunContext& ctx) {
  const GeneratorOptions opts = a.gen.build(a.seed);
  const ScmSpec spec = random_spec(opts);
  const Simulation sim = simulate(spec);
  ctx.seeds = {{"seed", a.seed}, {"spec_seed", derive_seed(a.seed, 0)}, {"simulation_seed", spec.seed}};

  const fs::path out_dir = a.out;
  const fs::path data_path = out_dir / "data.csv";
  save_csv(sim.data, data_path);
  ctx.outputs.push_back(data_path.string());
  ctx.outputs.push_back(sidecar_path_for(data_path).string());
  const fs::path spec_path = a.spec_out.empty() ? out_dir / "spec.json" : fs::path(a.spec_out);
  ctx.write(spec_path, spec_to_json(spec).dump(2) + "\n");
  write_manifest(ctx, out_dir / "manifest.json");

  const auto names = sim.data.component_names();
  if (ctx.json_output) {
    json rows = json::array();
    for (int j = 0; j < spec.n; ++j)
      rows.push_back({{"component", names[static_cast<std::size_t>(j)]},
                      {"change_point", spec.change_points[static_cast<std::size_t>(j)]},
                      {"kind", to_string(spec.change_kind[static_cast<std::size_t>(j)])},
                      {"parents_pre", format_parent_set(sim.truth.pre_parents[static_cast<std::size_t>(j)], names)},
                      {"parents_post", format_parent_set(sim.truth.post_parents[static_cast<std::size_t>(j)], names)}});
    std::cout << rows.dump(2) << '\n';
  } else {
    for (int j = 0; j < spec.n; ++j)
      std::cout << names[static_cast<std::size_t>(j)] << "  change at " << spec.change_points[static_cast<std::size_t>(j)]
                << " (" << to_string(spec.change_kind[static_cast<std::size_t>(j)]) << ")  before "
                << format_parent_set(sim.truth.pre_parents[static_cast<std::size_t>(j)], names) << "  after "
                << format_parent_set(sim.truth.post_parents[static_cast<std::size_t>(j)], names) << '\n';
  }
}

struct DiscoverArgs {
  DataOptions data;
  int tau_ub = 5;
  double alpha = 0.01;
  int n_intervals = 2;
  int pc_max_conds = 3;
  int max_conds_px = 3;
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
};

void run_discover(const DiscoverArgs& a, RunContext& ctx) {
  ctx.seeds = {{"seed", a.seed}};
  const Dataset ds = a.data.load();
  ctx.input(a.data.in);
  DiscoveryConfig cfg;
  cfg.tau_ub = a.tau_ub;
  cfg.alpha_level = a.alpha;
  cfg.n_intervals = a.n_intervals;
  cfg.pc_max_conds = a.pc_max_conds;
  cfg.max_conds_px = a.max_conds_px;
  const ParentGraph graph = discover_superset(ds, cfg);
  const json j = parent_graph_to_json(graph, ds.component_names());
  if (!a.out.empty()) ctx.write(a.out, j.dump(2) + "\n");
  write_manifest(ctx, manifest_path(a.manifest, a.out, "discover"));
  std::cout << (ctx.json_output ? j.dump(2) + "\n" : parents_table(graph, ds.component_names()));
}

struct DetectArgs {
  DataOptions data;
  DetectorOptions det;
  std::string spec;
  std::string parents;
  std::string dump_segments;
  std::string out;
  std::string table;
  bool no_series = false;
  std::uint64_t seed = 0;
  std::string manifest;
};

void run_detect(const DetectArgs& a, RunContext& ctx) {
  if (!a.spec.empty() && !a.parents.empty()) throw std::invalid_argument("--spec and --parents are exclusive");
  ctx.seeds = {{"seed", a.seed}};
  const Dataset ds = a.data.load();
  ctx.input(a.data.in);
  const DetectorConfig cfg = a.det.build();

  DetectionReport report;
  if (!a.spec.empty()) {
    ctx.input(a.spec);
    const ScmSpec spec = spec_from_json(read_json_file(a.spec));
    if (spec.n != ds.components())
      throw DataError("spec has " + std::to_string(spec.n) + " components, data has " + std::to_string(ds.components()));
    report = detect_with_parents(ds, ground_truth(spec).union_parents, cfg);
  } else if (!a.parents.empty()) {
    ctx.input(a.parents);
    report = detect_with_parents(ds, parent_graph_from_json(read_json_file(a.parents), ds.component_names()), cfg);
  } else {
    report = detect(ds, cfg);
  }

  if (!a.dump_segments.empty()) {
    const fs::path dir = a.dump_segments;
    for (const auto& c : report.components) {
      const auto segments = build_segments(ds, c.spa, c.component, c.spa.max_lag());
      dump_segments(ds, segments, dir);
    }
    ctx.write(dir / "domain.json", json{{"domain", ds.domain().symbols()}}.dump() + "\n");
  }

  const json rows = detection_table_rows(report, ds);
  const std::string table = ctx.json_output ? rows.dump(2) + "\n" : format_detection_table(report, ds);
  if (!a.out.empty()) ctx.write(a.out, report_to_json(report, ds, !a.no_series).dump(2) + "\n");
  if (!a.table.empty()) ctx.write(a.table, table);
  write_manifest(ctx, manifest_path(a.manifest, a.out.empty() ? a.table : a.out, "detect"));
  std::cout << table;
}

struct PeArgs {
  std::string segment_dump;
  double alpha = 0.1;
  int nw = 50;
  int nst = 1;
  std::string estimator = "plugin";
  double sigma = 0.0;
  double lambda = 0.01;
  int max_centers = 100;
  bool cv = false;
  std::string domain;
  std::uint64_t seed = 0;
  std::string out;
};

void run_pe(const PeArgs& a, RunContext& ctx) {
  ctx.seeds = {{"seed", a.seed}};
  const fs::path dump = a.segment_dump;
  const auto files = load_segment_dump(dump);
  ctx.input(dump);

  std::optional<Domain> domain;
  if (!a.domain.empty()) {
    domain = Domain(parse_int_list(a.domain, "--domain"));
  } else if (fs::exists(dump / "domain.json")) {
    const json j = read_json_file(dump / "domain.json");
    if (!j.contains("domain")) throw DataError("'" + (dump / "domain.json").string() + "' has no domain");
    domain = Domain(j["domain"].get<std::vector<int>>());
  } else {
    std::vector<int> all;
    for (const auto& f : files) all.insert(all.end(), f.symbols.begin(), f.symbols.end());
    domain = Domain::infer(all);
  }

  PeParams params;
  params.alpha = a.alpha;
  params.n_w = a.nw;
  params.n_st = a.nst;
  params.estimator = parse_estimator(a.estimator);
  params.kernel.sigma = a.sigma;
  params.kernel.lambda = a.lambda;
  params.kernel.max_centers = a.max_centers;
  params.kernel.cross_validate = a.cv;
  params.validate();

  const fs::path out_dir = a.out.empty() ? dump : fs::path(a.out);
  json rows = json::array();
  for (std::size_t k = 0; k < files.size(); ++k) {
    const auto& f = files[k];
    Segment seg;
    seg.config_index = static_cast<int>(k);
    seg.time_indices = f.times;
    for (int v : f.symbols) {
      const auto code = domain->code_of(v);
      if (!code) throw DataError("'" + f.path.string() + "': symbol " + std::to_string(v) + " is outside the domain");
      seg.values.push_back(*code);
    }
    const PeSeries s = pe_series(seg, domain->size(), params);
    const std::string stem = f.path.stem().string();
    ctx.write(out_dir / (stem + ".pe.csv"), pe_series_csv(s));
    svg::Series line{stem, {}, s.scores};
    for (std::size_t i = 0; i < s.size(); ++i) line.x.push_back(static_cast<double>(i));
    ctx.write(out_dir / (stem + ".pe.svg"), svg::line_chart("Divergence series " + stem, "window index", "PE", {line}));

    json row = {{"segment", stem}, {"length", seg.length()}, {"windows", s.size()}};
    if (!s.empty()) {
      const auto best = std::max_element(s.scores.begin(), s.scores.end());
      row["peak_window"] = best - s.scores.begin();
      row["peak_score"] = *best;
    }
    rows.push_back(std::move(row));
  }
  write_manifest(ctx, out_dir / "pe.manifest.json");

  if (ctx.json_output) {
    std::cout << rows.dump(2) << '\n';
    return;
  }
  for (const auto& r : rows) {
    std::cout << r["segment"].get<std::string>() << "  length " << r["length"] << "  windows " << r["windows"];
    if (r.contains("peak_score")) std::cout << "  peak " << r["peak_score"] << " at window " << r["peak_window"];
    std::cout << '\n';
  }
}

struct EvaluateArgs {
  GeneratorCliOptions gen;
  DetectorOptions det;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string q = "10,25,50,100,200";
  std::string methods = "causal-rulsif,mean-change";
  std::string setting;
  std::string out;
};

void run_evaluate(const EvaluateArgs& a, RunContext& ctx) {
  TrialBatchConfig cfg;
  cfg.spec_template = a.gen.build(a.seed);
  cfg.detector = a.det.build();
  cfg.n_trials = a.trials;
  cfg.seed = a.seed;
  cfg.q_grid.clear();
  for (const auto& item : split_list(a.q)) cfg.q_grid.push_back(parse_double(item, "--q"));
  cfg.setting = a.setting.empty()
                    ? a.gen.kind + "-spa" + std::to_string(a.gen.spa) + "-T" + std::to_string(a.gen.t)
                    : a.setting;
  std::vector<Method> methods;
  for (const auto& name : split_list(a.methods)) {
    if (name == "causal-rulsif")
      methods.push_back(causal_rulsif_method(cfg.detector));
    else if (name == "causal-rulsif-oracle-spa")
      methods.push_back(causal_rulsif_method(cfg.detector, true));
    else if (name == "mean-change")
      methods.push_back(mean_change_method());
    else if (name == "oracle")
      methods.push_back(oracle_method());
    else
      throw std::invalid_argument("unknown method '" + name +
                                  "' (causal-rulsif, causal-rulsif-oracle-spa, mean-change, oracle)");
  }
  ctx.seeds = {{"seed", a.seed}, {"trial_seeds", "derive_seed(seed, trial)"}};

  const MetricsReport report = run_batch(cfg, methods);
  const fs::path dir = a.out;
  ctx.write(dir / "metrics.json", metrics_to_json(report).dump(2) + "\n");
  ctx.write(dir / "accuracy.csv", metrics_accuracy_csv(report));
  ctx.write(dir / "error.csv", metrics_error_csv(report));
  ctx.write(dir / "accuracy.svg", metrics_accuracy_svg(report));
  std::string lines;
  for (const auto& r : report.records) lines += trial_record_to_json(r).dump() + "\n";
  ctx.write(dir / "trials.jsonl", lines);

  json timing = json::array();
  for (const auto& r : report.records)
    if (r.component == 0) timing.push_back({{"trial", r.trial}, {"method", r.method}, {"seconds", r.seconds}});
  json per_method = json::object();
  for (const auto& m : report.methods) per_method[m.method] = m.mean_seconds;
  write_file_atomic(dir / "timing.json", json{{"mean_seconds", per_method}, {"trials", timing}}.dump(2) + "\n");
  write_manifest(ctx, dir / "manifest.json");

  if (ctx.json_output) {
    std::cout << metrics_to_json(report).dump(2) << '\n';
    return;
  }
  std::cout << metrics_error_csv(report) << '\n' << metrics_accuracy_csv(report);
}

// ---------------------------------------------------------------------------

// Position of the subcommand token in argv (0 when absent).
int find_subcommand(int argc, char** argv) {
  for (int k = 1; k < argc; ++k)
    if (std::find(kSubcommands.begin(), kSubcommands.end(), argv[k]) != kSubcommands.end()) return k;
  return 0;
}

std::string find_config(int argc, char** argv) {
  std::string path;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--config" && k + 1 < argc) path = argv[k + 1];
    if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
  }
  return path;
}

// argv with the config file's entries spliced in right after the
// subcommand, ahead of every explicit flag.
std::vector<std::string> expand_arguments(int argc, char** argv) {
  std::vector<std::string> args{argv[0]};
  const int sub_at = find_subcommand(argc, argv);
  std::string subcommand = sub_at > 0 ? argv[sub_at] : "";
  std::vector<std::string> injected;

  const std::string config_path = find_config(argc, argv);
  if (!config_path.empty()) {
    json config;
    try {
      config = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
      throw std::invalid_argument("config '" + config_path + "': " + e.what());
    } catch (const DataError& e) {
      throw std::invalid_argument(e.what());
    }
    if (!config.is_object()) throw std::invalid_argument("config '" + config_path + "' must be a JSON object");
    if (config.contains("config") && config["config"].is_object()) {
      if (subcommand.empty() && config.contains("subcommand")) subcommand = config["subcommand"].get<std::string>();
      config = config["config"];
    }
    for (const auto& [key, value] : config.items()) {
      if (value.is_null()) continue;
      const std::string v = config_value(value);
      if (v.empty()) continue;
      injected.push_back("--" + key + "=" + v);
    }
  }

  if (!subcommand.empty()) args.push_back(subcommand);
  args.insert(args.end(), injected.begin(), injected.end());
  for (int k = 1; k < argc; ++k)
    if (k != sub_at) args.emplace_back(argv[k]);
  return args;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Change-point detection in discrete multivariate time series", "causal-cpd"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_file;
  int threads = 0;
  bool json_output = false;
  app.add_option("--config", config_file, "JSON file of flag/value pairs (or a run manifest)");
  app.add_option("--threads", threads, "Worker threads (default: CAUSAL_CPD_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json", json_output, "Print machine-readable JSON instead of tables");

  auto* gen_app = app.add_subcommand("generate", "Simulate a mechanism-shift dataset");
  auto* disc_app = app.add_subcommand("discover", "Estimate union parent sets");
  auto* det_app = app.add_subcommand("detect", "Locate one change point per component");
  auto* pe_app = app.add_subcommand("pe", "Divergence series for a segment dump");
  auto* eval_app = app.add_subcommand("evaluate", "Monte-Carlo comparison on simulated data");

  GenerateArgs gen;
  Options gen_opts(gen_app);
  gen.gen.add(gen_opts);
  gen_opts.add("seed", gen.seed, "Base seed");
  gen_opts.add("out", gen.out, "Output directory (data.csv, data.schema.json, spec.json)")->required();
  gen_opts.add("spec-out", gen.spec_out, "Spec JSON path (default: <out>/spec.json)");

  DiscoverArgs disc;
  Options disc_opts(disc_app);
  disc.data.add(disc_opts);
  disc_opts.add("tau-ub", disc.tau_ub, "Largest lag searched");
  disc_opts.add("alpha", disc.alpha, "Significance level of the independence tests");
  disc_opts.add("n-intervals", disc.n_intervals, "Consecutive intervals whose graphs are merged");
  disc_opts.add("pc-max-conds", disc.pc_max_conds, "Largest conditioning set in the selection phase");
  disc_opts.add("max-conds-px", disc.max_conds_px, "Source parents added to momentary tests");
  disc_opts.add("seed", disc.seed, "Recorded in the manifest; the computation itself draws no random numbers");
  disc_opts.add("out", disc.out, "Parent graph JSON");
  disc_opts.add("manifest", disc.manifest, "Manifest path (default: <out>.manifest.json)");

  DetectArgs det;
  Options det_opts(det_app);
  det.data.add(det_opts);
  det.det.add(det_opts, true);
  det_opts.add("spec", det.spec, "Use the union parents of this generated spec instead of discovery");
  det_opts.add("parents", det.parents, "Use this parent graph JSON instead of discovery");
  det_opts.add("dump-segments", det.dump_segments, "Write one CSV per segment into this directory");
  det_opts.add("seed", det.seed, "Recorded in the manifest; the computation itself draws no random numbers");
  det_opts.add("out", det.out, "Report JSON");
  det_opts.add("table", det.table, "Summary table file");
  det_opts.flag("no-series", det.no_series, "Leave divergence series out of the report");
  det_opts.add("manifest", det.manifest, "Manifest path (default: <out>.manifest.json)");

  PeArgs pe;
  Options pe_opts(pe_app);
  pe_opts.add("segment-dump", pe.segment_dump, "Directory written by detect --dump-segments")->required();
  pe_opts.add("alpha", pe.alpha, "Relative divergence mixing parameter");
  pe_opts.add("nw", pe.nw, "Samples per window half");
  pe_opts.add("nst", pe.nst, "Window stride");
  pe_opts.add("estimator", pe.estimator, "plugin or kernel")->check(CLI::IsMember({"plugin", "kernel"}));
  pe_opts.add("sigma", pe.sigma, "Kernel width (0: median heuristic)");
  pe_opts.add("lambda", pe.lambda, "Kernel ridge parameter");
  pe_opts.add("max-centers", pe.max_centers, "Kernel centers per window");
  pe_opts.flag("cv", pe.cv, "Cross-validate kernel width and ridge parameter");
  pe_opts.add("domain", pe.domain, "Comma-separated symbol list (default: domain.json or inferred)");
  pe_opts.add("seed", pe.seed, "Recorded in the manifest; the computation itself draws no random numbers");
  pe_opts.add("out", pe.out, "Output directory (default: the segment dump)");

  EvaluateArgs ev;
  Options ev_opts(eval_app);
  ev.gen.add(ev_opts);
  ev.det.add(ev_opts, false);
  ev_opts.add("trials", ev.trials, "Number of simulated datasets");
  ev_opts.add("seed", ev.seed, "Base seed");
  ev_opts.add("q", ev.q, "Comma-separated interval half-lengths");
  ev_opts.add("methods", ev.methods, "causal-rulsif, causal-rulsif-oracle-spa, mean-change, oracle");
  ev_opts.add("setting", ev.setting, "Label of this setting in the outputs");
  ev_opts.add("out", ev.out, "Output directory")->required();

  if (argc < 2) {
    std::cerr << app.help();
    return 1;
  }

  try {
    const std::vector<std::string> args = expand_arguments(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
      app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }

    if (threads > 0) set_thread_count(threads);
    RunContext ctx;
    ctx.json_output = json_output;
    if (gen_app->parsed()) {
      ctx.subcommand = "generate";
      ctx.config = gen_opts.resolved();
      run_generate(gen, ctx);
    } else if (disc_app->parsed()) {
      ctx.subcommand = "discover";
      ctx.config = disc_opts.resolved();
      run_discover(disc, ctx);
    } else if (det_app->parsed()) {
      ctx.subcommand = "detect";
      ctx.config = det_opts.resolved();
      run_detect(det, ctx);
    } else if (pe_app->parsed()) {
      ctx.subcommand = "pe";
      ctx.config = pe_opts.resolved();
      run_pe(pe, ctx);
    } else if (eval_app->parsed()) {
      ctx.subcommand = "evaluate";
      ctx.config = ev_opts.resolved();
      run_evaluate(ev, ctx);
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "causal-cpd: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "causal-cpd: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "causal-cpd: internal error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace ccpd::cli
