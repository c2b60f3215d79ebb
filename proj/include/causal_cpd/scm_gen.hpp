#ifndef CAUSAL_CPD_SCM_GEN_HPP
#define CAUSAL_CPD_SCM_GEN_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causal_cpd/dataset.hpp"
#include "causal_cpd/lagged_parents.hpp"
#include "causal_cpd/rng.hpp"

namespace ccpd {

/// soft: the parent set is the same before and after the change, only the
/// conditional tables move. hard: the parent set itself changes.
/// (Some write-ups swap these two words; the edge-array definition is used.)
enum class ChangeKind { soft, hard };

const char* to_string(ChangeKind kind);
/// Accepts "soft" / "hard"; throws std::invalid_argument otherwise.
ChangeKind parse_change_kind(const std::string& text);

/// Conditional probability table of one component in one regime. Row k is
/// the distribution of the child given parent configuration k, with
/// configurations in odometer order over `parents` (last parent fastest).
struct RegimeMechanism {
  LaggedParentSet parents;
  Eigen::MatrixXd cpt;
};

/// Ground-truth description of a mechanism-shift SCM with one change point
/// per component. Times are 0-based: component j follows regimes[j][0] for
/// t < change_points[j] and regimes[j][1] from change_points[j] on.
struct ScmSpec {
  int n = 0;
  int length = 0;
  int tau_max = 1;
  Domain domain = Domain::binary();
  std::vector<int> change_points;
  std::vector<std::array<RegimeMechanism, 2>> regimes;
  std::vector<ChangeKind> change_kind;
  std::uint64_t seed = 0;
  /// Generation metadata (recorded for reproducibility, not used by simulate).
  int margin = 0;
  double min_divergence = 0.0;
  double alpha = 0.1;

  /// Throws std::invalid_argument when an invariant is broken. With
  /// allow_stationary, soft components may keep identical tables across the
  /// change (a no-change control).
  void validate(bool allow_stationary = false) const;
  LaggedParentSet union_parents(int component) const;
  ParentGraph union_parent_graph() const;
};

struct GeneratorOptions {
  int n = 3;
  int length = 6000;
  int tau_max = 4;
  Domain domain = Domain::binary();
  int spa_size = 3;
  ChangeKind kind = ChangeKind::soft;
  /// Change points are drawn from [margin, length - margin]; a negative
  /// value selects length / 5.
  int margin = -1;
  /// Rejection threshold on max_config PE(pre row, post row) at `alpha`.
  double min_divergence = 0.02;
  double alpha = 0.1;
  int max_attempts = 200000;
  std::uint64_t seed = 0;
};

int resolved_margin(const GeneratorOptions& opts);

/// Random spec: per component a union parent set of exactly spa_size links
/// that always contains the self-lag (j, 1), uniform-on-simplex CPT rows,
/// rejection-sampled until the pre/post divergence bound holds.
/// Throws std::invalid_argument for infeasible settings and DataError when
/// the rejection budget runs out (the message carries the best divergence).
ScmSpec random_spec(const GeneratorOptions& opts);

/// Largest PE(pre row, post row) at relative parameter alpha over all
/// configurations of the component's union parent set.
double regime_divergence(const ScmSpec& spec, int component, double alpha);

/// Row of `mech.cpt` for the parent configuration given as codes aligned
/// with mech.parents.
Eigen::Index cpt_row_index(const LaggedParentSet& parents, std::span<const int> config, int domain_size);

struct GroundTruth {
  std::vector<int> change_points;
  ParentGraph pre_parents;
  ParentGraph post_parents;
  ParentGraph union_parents;
};

struct Simulation {
  Dataset data;
  GroundTruth truth;
};

/// Samples a dataset from `spec`. The first tau_max steps are uniform over
/// the domain; everything after follows the active regime's CPT.
/// Deterministic in spec.seed.
Simulation simulate(const ScmSpec& spec);

GroundTruth ground_truth(const ScmSpec& spec);

/// Dense binary edge array with dims [parent n, regimes 2, child n, tau_max+1]
/// (lag 0 is always empty).
class EdgeArray {
 public:
  EdgeArray(int n, int tau_max);
  static EdgeArray from_spec(const ScmSpec& spec);

  int n() const { return n_; }
  int tau_max() const { return tau_max_; }
  bool at(int parent, int regime, int child, int lag) const;
  void set(int parent, int regime, int child, int lag, bool value);
  /// Parent set of `child` in `regime`.
  LaggedParentSet parents(int regime, int child) const;

 private:
  std::size_t offset(int parent, int regime, int child, int lag) const;

  int n_;
  int tau_max_;
  std::vector<unsigned char> bits_;
};

}  // namespace ccpd

#endif  // CAUSAL_CPD_SCM_GEN_HPP
