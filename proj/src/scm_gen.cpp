#include "causal_cpd/scm_gen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causal_cpd/error.hpp"
#include "causal_cpd/rulsif.hpp"
#include "causal_cpd/segments.hpp"

namespace ccpd {

const char* to_string(ChangeKind kind) { return kind == ChangeKind::soft ? "soft" : "hard"; }

ChangeKind parse_change_kind(const std::string& text) {
  if (text == "soft") return ChangeKind::soft;
  if (text == "hard") return ChangeKind::hard;
  throw std::invalid_argument("change kind must be 'soft' or 'hard', got '" + text + "'");
}

Eigen::Index cpt_row_index(const LaggedParentSet& parents, std::span<const int> config, int domain_size) {
  if (config.size() != parents.size()) throw std::invalid_argument("configuration size differs from the parent count");
  Eigen::Index idx = 0;
  for (int c : config) idx = idx * domain_size + c;
  return idx;
}

namespace {

// Codes of `subset` picked out of a configuration of `superset`.
std::vector<int> project_config(const LaggedParentSet& superset, const Eigen::Ref<const Eigen::VectorXi>& config,
                                const LaggedParentSet& subset) {
  std::vector<int> out;
  out.reserve(subset.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < superset.size() && out.size() < subset.size(); ++i)
    if (k < subset.size() && superset[i] == subset[k]) {
      out.push_back(config(static_cast<Eigen::Index>(i)));
      ++k;
    }
  return out;
}

double mechanism_divergence(const RegimeMechanism& pre, const RegimeMechanism& post, int s, double alpha) {
  const LaggedParentSet all = pre.parents | post.parents;
  const ConfigMatrix configs = ConfigMatrix::build(all, s);
  double best = 0.0;
  for (Eigen::Index k = 0; k < configs.count(); ++k) {
    const Eigen::VectorXi row = configs.rows.row(k).transpose();
    const auto a = project_config(all, row, pre.parents);
    const auto b = project_config(all, row, post.parents);
    const double d = pe_closed_form(pre.cpt.row(cpt_row_index(pre.parents, a, s)).transpose(),
                                    post.cpt.row(cpt_row_index(post.parents, b, s)).transpose(), alpha);
    best = std::max(best, d);
  }
  return best;
}

Eigen::MatrixXd random_cpt(Rng& rng, const LaggedParentSet& parents, int s) {
  const Eigen::Index rows = configuration_count(parents.size(), s);
  Eigen::MatrixXd cpt(rows, s);
  for (Eigen::Index r = 0; r < rows; ++r) cpt.row(r) = rng.flat_dirichlet(s).transpose();
  return cpt;
}

void check_mechanism(const RegimeMechanism& m, int n, int tau_max, int s, int j) {
  for (const auto& l : m.parents) {
    if (l.component < 0 || l.component >= n)
      throw std::invalid_argument("component " + std::to_string(j) + ": parent index out of range");
    if (l.lag < 1 || l.lag > tau_max)
      throw std::invalid_argument("component " + std::to_string(j) + ": parent lag outside [1, tau_max]");
  }
  if (m.cpt.rows() != configuration_count(m.parents.size(), s) || m.cpt.cols() != s)
    throw std::invalid_argument("component " + std::to_string(j) + ": CPT shape does not match its parent set");
  if ((m.cpt.array() < 0.0).any())
    throw std::invalid_argument("component " + std::to_string(j) + ": negative CPT entry");
  for (Eigen::Index r = 0; r < m.cpt.rows(); ++r)
    if (std::abs(m.cpt.row(r).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("component " + std::to_string(j) + ": CPT row does not sum to 1");
}

}  // namespace

void ScmSpec::validate(bool allow_stationary) const {
  if (n < 1) throw std::invalid_argument("spec needs at least one component");
  if (tau_max < 1) throw std::invalid_argument("tau_max must be >= 1");
  if (length <= tau_max + 1) throw std::invalid_argument("length must exceed tau_max + 1");
  const auto un = static_cast<std::size_t>(n);
  if (change_points.size() != un || regimes.size() != un || change_kind.size() != un)
    throw std::invalid_argument("spec needs exactly one change point, regime pair and change kind per component");
  const int s = domain.size();
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const int cp = change_points[uj];
    if (cp <= tau_max || cp >= length)
      throw std::invalid_argument("component " + std::to_string(j) + ": change point outside (tau_max, length)");
    if (margin > 0 && (cp < margin || cp > length - margin))
      throw std::invalid_argument("component " + std::to_string(j) + ": change point violates the boundary margin");
    const auto& [pre, post] = regimes[uj];
    check_mechanism(pre, n, tau_max, s, j);
    check_mechanism(post, n, tau_max, s, j);
    if (change_kind[uj] == ChangeKind::soft) {
      if (pre.parents != post.parents)
        throw std::invalid_argument("component " + std::to_string(j) + ": soft change must keep the parent set");
      if (!allow_stationary && pre.cpt == post.cpt)
        throw std::invalid_argument("component " + std::to_string(j) + ": soft change with identical tables");
    } else if (pre.parents == post.parents) {
      throw std::invalid_argument("component " + std::to_string(j) + ": hard change must alter the parent set");
    }
  }
}

LaggedParentSet ScmSpec::union_parents(int component) const {
  const auto& r = regimes.at(static_cast<std::size_t>(component));
  return r[0].parents | r[1].parents;
}

ParentGraph ScmSpec::union_parent_graph() const {
  ParentGraph g;
  for (int j = 0; j < n; ++j) g.push_back(union_parents(j));
  return g;
}

int resolved_margin(const GeneratorOptions& opts) { return opts.margin >= 0 ? opts.margin : opts.length / 5; }

double regime_divergence(const ScmSpec& spec, int component, double alpha) {
  const auto& r = spec.regimes.at(static_cast<std::size_t>(component));
  return mechanism_divergence(r[0], r[1], spec.domain.size(), alpha);
}

ScmSpec random_spec(const GeneratorOptions& opts) {
  if (opts.n < 1) throw std::invalid_argument("n must be >= 1");
  if (opts.tau_max < 1) throw std::invalid_argument("tau_max must be >= 1");
  if (opts.spa_size < 1) throw std::invalid_argument("spa size must be >= 1");
  if (opts.spa_size > opts.n * opts.tau_max)
    throw std::invalid_argument("spa size " + std::to_string(opts.spa_size) + " exceeds the " +
                                std::to_string(opts.n * opts.tau_max) + " available lagged parents");
  if (opts.kind == ChangeKind::hard && opts.spa_size < 2)
    throw std::invalid_argument("a hard change needs spa size >= 2 so the parent set can differ");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (opts.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  const int s = opts.domain.size();
  const Eigen::Index configs = configuration_count(static_cast<std::size_t>(opts.spa_size), s);
  if (configs * 10 > opts.length)
    throw std::invalid_argument("spa size " + std::to_string(opts.spa_size) + " gives " + std::to_string(configs) +
                                " configurations; length " + std::to_string(opts.length) +
                                " is too short to populate them (need >= 10 samples each)");
  const int margin = resolved_margin(opts);
  if (margin < 1) throw std::invalid_argument("margin must be >= 1");
  const int lo = std::max(margin, opts.tau_max + 1);
  const int hi = opts.length - margin;
  if (lo > hi) throw std::invalid_argument("no admissible change point: margin too large for the length");

  ScmSpec spec;
  spec.n = opts.n;
  spec.length = opts.length;
  spec.tau_max = opts.tau_max;
  spec.domain = opts.domain;
  spec.seed = opts.seed;
  spec.margin = margin;
  spec.min_divergence = opts.min_divergence;
  spec.alpha = opts.alpha;

  Rng rng(derive_seed(opts.seed, 0));
  for (int j = 0; j < opts.n; ++j) {
    spec.change_points.push_back(lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1))));
    spec.change_kind.push_back(opts.kind);

    std::vector<LaggedLink> others;
    for (int i = 0; i < opts.n; ++i)
      for (int lag = 1; lag <= opts.tau_max; ++lag)
        if (!(i == j && lag == 1)) others.push_back({i, lag});
    rng.shuffle(others.begin(), others.end());
    others.resize(static_cast<std::size_t>(opts.spa_size - 1));

    const LaggedLink self{j, 1};
    std::array<RegimeMechanism, 2> mech;
    if (opts.kind == ChangeKind::soft) {
      LaggedParentSet parents(others);
      parents.insert(self);
      mech[0].parents = mech[1].parents = parents;
    } else {
      do {
        mech[0].parents = mech[1].parents = LaggedParentSet{self};
        for (const auto& l : others) {
          const auto side = rng.uniform_index(3);  // 0 pre only, 1 post only, 2 both
          if (side != 1) mech[0].parents.insert(l);
          if (side != 0) mech[1].parents.insert(l);
        }
      } while (mech[0].parents == mech[1].parents);
    }

    double best = -1.0;
    bool accepted = false;
    for (int attempt = 0; attempt < opts.max_attempts && !accepted; ++attempt) {
      mech[0].cpt = random_cpt(rng, mech[0].parents, s);
      mech[1].cpt = random_cpt(rng, mech[1].parents, s);
      const double d = mechanism_divergence(mech[0], mech[1], s, opts.alpha);
      best = std::max(best, d);
      accepted = opts.min_divergence <= 0.0 || d > opts.min_divergence;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "component " << j << ": no CPT pair reached divergence " << opts.min_divergence << " in "
          << opts.max_attempts << " attempts (best " << best << ")";
      throw DataError(msg.str());
    }
    spec.regimes.push_back(std::move(mech));
  }
  spec.validate();
  return spec;
}

GroundTruth ground_truth(const ScmSpec& spec) {
  GroundTruth gt;
  gt.change_points = spec.change_points;
  for (int j = 0; j < spec.n; ++j) {
    const auto& r = spec.regimes[static_cast<std::size_t>(j)];
    gt.pre_parents.push_back(r[0].parents);
    gt.post_parents.push_back(r[1].parents);
    gt.union_parents.push_back(r[0].parents | r[1].parents);
  }
  return gt;
}

Simulation simulate(const ScmSpec& spec) {
  spec.validate(/*allow_stationary=*/true);
  const int s = spec.domain.size();
  CodeMatrix codes(spec.n, spec.length);
  Rng rng(derive_seed(spec.seed, 1));
  for (int t = 0; t < spec.tau_max; ++t)
    for (int j = 0; j < spec.n; ++j) codes(j, t) = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(s)));

  std::vector<int> config;
  for (int t = spec.tau_max; t < spec.length; ++t) {
    for (int j = 0; j < spec.n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const RegimeMechanism& mech = spec.regimes[uj][t < spec.change_points[uj] ? 0 : 1];
      config.clear();
      for (const auto& l : mech.parents) config.push_back(codes(l.component, t - l.lag));
      const Eigen::Index row = cpt_row_index(mech.parents, config, s);
      codes(j, t) = rng.categorical(mech.cpt.row(row).transpose());
    }
  }
  return {Dataset(std::move(codes), spec.domain), ground_truth(spec)};
}

// ---------------------------------------------------------------------------

EdgeArray::EdgeArray(int n, int tau_max)
    : n_(n), tau_max_(tau_max), bits_(static_cast<std::size_t>(n * 2 * n * (tau_max + 1)), 0) {}

std::size_t EdgeArray::offset(int parent, int regime, int child, int lag) const {
  if (parent < 0 || parent >= n_ || regime < 0 || regime > 1 || child < 0 || child >= n_ || lag < 0 || lag > tau_max_)
    throw std::out_of_range("edge array index out of range");
  return static_cast<std::size_t>(((parent * 2 + regime) * n_ + child) * (tau_max_ + 1) + lag);
}

bool EdgeArray::at(int parent, int regime, int child, int lag) const {
  return bits_[offset(parent, regime, child, lag)] != 0;
}

void EdgeArray::set(int parent, int regime, int child, int lag, bool value) {
  bits_[offset(parent, regime, child, lag)] = value ? 1 : 0;
}

LaggedParentSet EdgeArray::parents(int regime, int child) const {
  LaggedParentSet out;
  for (int p = 0; p < n_; ++p)
    for (int lag = 1; lag <= tau_max_; ++lag)
      if (at(p, regime, child, lag)) out.insert({p, lag});
  return out;
}

EdgeArray EdgeArray::from_spec(const ScmSpec& spec) {
  EdgeArray a(spec.n, spec.tau_max);
  for (int child = 0; child < spec.n; ++child)
    for (int regime = 0; regime < 2; ++regime)
      for (const auto& l : spec.regimes[static_cast<std::size_t>(child)][static_cast<std::size_t>(regime)].parents)
        a.set(l.component, regime, child, l.lag, true);
  return a;
}

}  // namespace ccpd
