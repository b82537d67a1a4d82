#pragma once

#include <cstdint>
#include <limits>

namespace geoaug {

/// Counter-based, splittable random generator.
///
/// Each draw is a keyed hash of a 64-bit counter, so a stream is fully
/// determined by (seed, stream id) and child streams obtained with split()
/// never overlap their parent. Normal and uniform variates are produced
/// in-house so results are bit-identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Independent child generator identified by `stream`.
  Rng split(std::uint64_t stream) const;

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal via Box-Muller (one variate per call).
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Rademacher sign, -1 or +1 with equal probability.
  int sign();

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  Rng(std::uint64_t key, std::uint64_t counter, int /*raw*/) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace geoaug
