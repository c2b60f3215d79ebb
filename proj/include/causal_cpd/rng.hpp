#ifndef CAUSAL_CPD_RNG_HPP
#define CAUSAL_CPD_RNG_HPP

#include <cstdint>
#include <random>
#include <utility>

#include <Eigen/Dense>

namespace ccpd {

/// Child seed for stream `stream` of a base seed (splitmix64 finalizer over
/// both words). Used to give every trial / sub-step its own independent
/// generator so results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Thin wrapper around mt19937_64. All draws are built from raw engine
/// output so sequences are identical across standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n-1}, unbiased.
  std::uint64_t uniform_index(std::uint64_t n);
  double exponential();
  /// Uniform draw from the (s-1)-simplex.
  Eigen::VectorXd flat_dirichlet(Eigen::Index s);
  /// Index drawn with the given (normalized) probabilities.
  int categorical(const Eigen::Ref<const Eigen::VectorXd>& probs);

  template <typename It>
  void shuffle(It first, It last) {
    for (auto n = last - first; n > 1; --n) {
      const auto k = static_cast<decltype(n)>(uniform_index(static_cast<std::uint64_t>(n)));
      using std::swap;
      swap(first[n - 1], first[k]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ccpd

#endif  // CAUSAL_CPD_RNG_HPP
