#include "causal_cpd/citest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

#include "causal_cpd/error.hpp"

namespace ccpd {

namespace {

constexpr std::size_t kDenseCellLimit = std::size_t{1} << 22;

struct StratumStats {
  double statistic = 0.0;
  int dof = 0;
  long used = 0;
};

// One s x s table (row-major counts[a * s + b]).
StratumStats score_stratum(const long* counts, int s) {
  long total = 0;
  std::vector<long> rows(static_cast<std::size_t>(s), 0), cols(static_cast<std::size_t>(s), 0);
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) {
      const long o = counts[a * s + b];
      rows[static_cast<std::size_t>(a)] += o;
      cols[static_cast<std::size_t>(b)] += o;
      total += o;
    }
  const auto r = std::count_if(rows.begin(), rows.end(), [](long v) { return v > 0; });
  const auto c = std::count_if(cols.begin(), cols.end(), [](long v) { return v > 0; });
  StratumStats st;
  if (r < 2 || c < 2) return st;
  if (total < 5 * r * c) return st;  // too thin for the chi-square approximation
  double g = 0.0;
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) {
      const long o = counts[a * s + b];
      if (o == 0) continue;
      const double expected = static_cast<double>(rows[static_cast<std::size_t>(a)]) *
                              static_cast<double>(cols[static_cast<std::size_t>(b)]) / static_cast<double>(total);
      g += static_cast<double>(o) * std::log(static_cast<double>(o) / expected);
    }
  st.statistic = std::max(0.0, 2.0 * g);
  st.dof = static_cast<int>((r - 1) * (c - 1));
  st.used = total;
  return st;
}

bool is_constant(std::span<const int> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace

CiVerdict g_test(std::span<const int> x, std::span<const int> y, const std::vector<std::span<const int>>& cond,
                 int domain_size, double alpha_level) {
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw std::invalid_argument("alpha level must lie in (0, 1)");
  if (domain_size < 2) throw std::invalid_argument("domain size must be >= 2");
  const std::size_t n = x.size();
  if (n == 0) throw DataError("conditional independence test on an empty sample");
  if (y.size() != n) throw std::invalid_argument("g_test: x and y lengths differ");
  for (const auto& c : cond)
    if (c.size() != n) throw std::invalid_argument("g_test: conditioning column length differs");

  CiVerdict v;
  v.effective_samples = static_cast<long>(n);
  if (is_constant(x) || is_constant(y)) return v;

  const auto s = static_cast<std::size_t>(domain_size);
  const std::size_t cells = s * s;

  // Stratum key per sample (mixed radix over the conditioning columns).
  double strata_d = 1.0;
  for (std::size_t k = 0; k < cond.size(); ++k) strata_d *= static_cast<double>(s);
  if (strata_d > 0x1.0p62) {  // keys would overflow; no stratum could be testable anyway
    v.sparse = true;
    v.effective_samples = 0;
    return v;
  }
  std::vector<std::uint64_t> key(n, 0);
  for (const auto& c : cond)
    for (std::size_t t = 0; t < n; ++t) key[t] = key[t] * s + static_cast<std::uint64_t>(c[t]);

  std::vector<StratumStats> stats;
  std::size_t occupied = 0;
  if (strata_d * static_cast<double>(cells) <= static_cast<double>(kDenseCellLimit)) {
    const auto strata = static_cast<std::size_t>(strata_d);
    std::vector<long> counts(strata * cells, 0);
    for (std::size_t t = 0; t < n; ++t)
      ++counts[key[t] * cells + static_cast<std::size_t>(x[t]) * s + static_cast<std::size_t>(y[t])];
    for (std::size_t z = 0; z < strata; ++z) {
      const long* table = counts.data() + z * cells;
      if (std::all_of(table, table + cells, [](long o) { return o == 0; })) continue;
      ++occupied;
      stats.push_back(score_stratum(table, domain_size));
    }
  } else {
    std::unordered_map<std::uint64_t, std::vector<long>> tables;
    for (std::size_t t = 0; t < n; ++t) {
      auto& table = tables[key[t]];
      if (table.empty()) table.assign(cells, 0);
      ++table[static_cast<std::size_t>(x[t]) * s + static_cast<std::size_t>(y[t])];
    }
    occupied = tables.size();
    std::vector<std::uint64_t> keys;
    keys.reserve(tables.size());
    for (const auto& kv : tables) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());  // fixed summation order
    for (auto k : keys) stats.push_back(score_stratum(tables[k].data(), domain_size));
  }

  long used = 0;
  for (const auto& st : stats) {
    v.statistic += st.statistic;
    v.dof += st.dof;
    used += st.used;
  }
  v.effective_samples = used;
  v.p_value = v.dof > 0 ? boost::math::gamma_q(0.5 * v.dof, 0.5 * v.statistic) : 1.0;
  v.independent = v.p_value > alpha_level;

  v.sparse = static_cast<double>(n) < 5.0 * static_cast<double>(cells) * static_cast<double>(occupied);
  return v;
}

CiVerdict g_test(const Dataset& ds, const CiQuery& q, TimeRange range) {
  const int n = ds.components();
  auto check_link = [&](const LaggedLink& l, const char* what) {
    if (l.component < 0 || l.component >= n) throw std::invalid_argument(std::string(what) + ": component out of range");
    if (l.lag < 1) throw std::invalid_argument(std::string(what) + ": lag must be >= 1");
  };
  check_link(q.x, "ci query x");
  if (q.target < 0 || q.target >= n) throw std::invalid_argument("ci query target out of range");
  for (const auto& c : q.cond) check_link(c, "ci query condition");
  if (q.cond.contains(q.x)) throw std::invalid_argument("ci query: x appears in the conditioning set");

  const int max_lag = std::max(q.x.lag, q.cond.max_lag());
  const int begin = std::max(range.begin, max_lag);
  const int end = std::min(range.end, ds.length());
  if (end <= begin) throw DataError("ci test: no target times left in [" + std::to_string(range.begin) + ", " +
                                    std::to_string(range.end) + ") after lag " + std::to_string(max_lag));
  const auto count = static_cast<std::size_t>(end - begin);
  auto column = [&](int component, int lag) {
    return ds.series(component).subspan(static_cast<std::size_t>(begin - lag), count);
  };
  std::vector<std::span<const int>> cond;
  cond.reserve(q.cond.size());
  for (const auto& c : q.cond) cond.push_back(column(c.component, c.lag));
  return g_test(column(q.x.component, q.x.lag), column(q.target, 0), cond, ds.domain_size(), q.alpha_level);
}

}  // namespace ccpd
