#pragma once

#include <cstdint>
#include <random>

namespace tppca {

/// Seedable random stream. Every sampler takes one of these by reference;
/// there is no global generator.
///
/// Streams are split deterministically: `split(i)` depends only on the
/// parent seed and `i`, never on how many draws the parent has made. Parallel
/// work indexed by `i` therefore reproduces regardless of scheduling.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed);

  RandomStream split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  engine_type& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  engine_type engine_;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tppca
