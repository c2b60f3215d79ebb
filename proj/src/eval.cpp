#include "causal_cpd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "causal_cpd/parallel.hpp"
#include "causal_cpd/rng.hpp"

namespace ccpd {

MeanChangeResult mean_change_baseline(std::span<const int> series) {
  const auto n = static_cast<int>(series.size());
  if (n < 4) throw std::invalid_argument("mean change baseline needs at least 4 samples");
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (int t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + series[static_cast<std::size_t>(t)];
  bool constant = true;
  for (int t = 1; t < n && constant; ++t) constant = series[static_cast<std::size_t>(t)] == series[0];
  if (constant) return {n / 2, true};

  MeanChangeResult best{1, false};
  double best_stat = -1.0;
  const double total = prefix[n];
  for (int k = 1; k < n; ++k) {
    const double left = prefix[k] / k;
    const double right = (total - prefix[k]) / (n - k);
    const double stat = std::abs(left - right) * std::sqrt(static_cast<double>(k) * (n - k) / n);
    if (stat > best_stat) {
      best_stat = stat;
      best.index = k;
    }
  }
  return best;
}

Method causal_rulsif_method(const DetectorConfig& cfg, bool oracle_parents) {
  return {oracle_parents ? "causal-rulsif-oracle-spa" : "causal-rulsif",
          [cfg, oracle_parents](const Dataset& ds, const GroundTruth& truth) {
            const DetectionReport report =
                oracle_parents ? detect_with_parents(ds, truth.union_parents, cfg) : detect(ds, cfg);
            std::vector<double> out;
            for (const auto& c : report.components)
              out.push_back(c.detected ? c.projected_time : static_cast<double>(ds.length()));
            return out;
          }};
}

Method mean_change_method() {
  return {"mean-change", [](const Dataset& ds, const GroundTruth&) {
            std::vector<double> out;
            for (int j = 0; j < ds.components(); ++j) out.push_back(mean_change_baseline(ds.series(j)).index);
            return out;
          }};
}

Method oracle_method() {
  return {"oracle", [](const Dataset&, const GroundTruth& truth) {
            return std::vector<double>(truth.change_points.begin(), truth.change_points.end());
          }};
}

void TrialBatchConfig::validate() const {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (q_grid.empty()) throw std::invalid_argument("q grid must not be empty");
  for (std::size_t k = 0; k < q_grid.size(); ++k) {
    if (!(q_grid[k] > 0.0)) throw std::invalid_argument("q grid values must be positive");
    if (k > 0 && !(q_grid[k] > q_grid[k - 1])) throw std::invalid_argument("q grid must be increasing");
  }
  detector.validate();
}

const MethodMetrics& MetricsReport::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.method == name) return m;
  throw std::out_of_range("no metrics for method '" + name + "'");
}

double accuracy_at(std::span<const TrialRecord> records, double q) {
  int hits = 0, total = 0;
  for (const auto& r : records) {
    if (r.failed) continue;
    ++total;
    if (std::abs(r.estimate - r.true_change) <= q) ++hits;
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / total;
}

namespace {

// Sample standard deviation over sqrt(N); 0 below two samples.
double standard_error(const std::vector<double>& values, double mean) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace

MetricsReport aggregate(std::vector<TrialRecord> records, const std::vector<double>& q_grid, int length,
                        std::string setting) {
  MetricsReport report;
  report.setting = std::move(setting);
  report.length = length;
  report.q_grid = q_grid;
  std::vector<std::string> order;
  for (const auto& r : records)
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);

  for (const auto& name : order) {
    MethodMetrics m;
    m.method = name;
    std::vector<TrialRecord> mine;
    std::vector<double> errors, seconds;
    for (const auto& r : records) {
      if (r.method != name) continue;
      seconds.push_back(r.seconds);
      if (r.failed) {
        ++m.failed;
        continue;
      }
      mine.push_back(r);
      errors.push_back(r.error);
    }
    m.samples = static_cast<int>(mine.size());
    m.mean_error = mean_of(errors);
    m.stderr_error = standard_error(errors, m.mean_error);
    for (double q : q_grid) {
      std::vector<double> hits;
      for (const auto& r : mine) hits.push_back(std::abs(r.estimate - r.true_change) <= q ? 1.0 : 0.0);
      const double acc = mean_of(hits);
      m.accuracy.push_back(acc);
      m.accuracy_stderr.push_back(standard_error(hits, acc));
    }
    m.mean_seconds = mean_of(seconds);
    report.methods.push_back(std::move(m));
  }
  report.records = std::move(records);
  return report;
}

MetricsReport run_batch(const TrialBatchConfig& cfg, const std::vector<Method>& methods) {
  cfg.validate();
  if (methods.empty()) throw std::invalid_argument("run_batch needs at least one method");
  using clock = std::chrono::steady_clock;
  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.n_trials));

  parallel_for(per_trial.size(), [&](std::size_t trial) {
    auto& out = per_trial[trial];
    const std::uint64_t trial_seed = derive_seed(cfg.seed, trial);
    GeneratorOptions opts = cfg.spec_template;
    opts.seed = trial_seed;

    auto fail_all = [&](const std::string& message, const std::vector<int>& truth) {
      for (const auto& m : methods)
        for (int j = 0; j < opts.n; ++j) {
          TrialRecord r;
          r.trial = static_cast<int>(trial);
          r.trial_seed = trial_seed;
          r.method = m.name;
          r.component = j;
          r.true_change = truth.empty() ? 0 : truth[static_cast<std::size_t>(j)];
          r.failed = true;
          r.message = message;
          out.push_back(std::move(r));
        }
    };

    std::optional<Simulation> sim;
    try {
      sim = simulate(random_spec(opts));
    } catch (const std::exception& e) {
      fail_all(std::string("generation failed: ") + e.what(), {});
      return;
    }
    const auto& truth = sim->truth;
    for (const auto& m : methods) {
      const auto start = clock::now();
      std::vector<double> estimates;
      std::string message;
      try {
        estimates = m.estimate(sim->data, truth);
        if (static_cast<int>(estimates.size()) != sim->data.components())
          message = "method returned " + std::to_string(estimates.size()) + " estimates";
      } catch (const std::exception& e) {
        message = e.what();
      }
      const double seconds = std::chrono::duration<double>(clock::now() - start).count();
      for (int j = 0; j < sim->data.components(); ++j) {
        TrialRecord r;
        r.trial = static_cast<int>(trial);
        r.trial_seed = trial_seed;
        r.method = m.name;
        r.component = j;
        r.true_change = truth.change_points[static_cast<std::size_t>(j)];
        r.seconds = seconds;
        if (!message.empty()) {
          r.failed = true;
          r.message = message;
        } else {
          r.estimate = estimates[static_cast<std::size_t>(j)];
          r.error = std::abs(r.estimate - r.true_change) / sim->data.length();
        }
        out.push_back(std::move(r));
      }
    }
  });

  std::vector<TrialRecord> records;
  for (auto& trial : per_trial)
    for (auto& r : trial) records.push_back(std::move(r));
  return aggregate(std::move(records), cfg.q_grid, cfg.spec_template.length, cfg.setting);
}

}  // namespace ccpd
