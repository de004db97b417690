#pragma once

#include <cstdint>

namespace brw {

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `index` under `master`. Pure function of both arguments.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// xoshiro256** with SplitMix64 seeding. All variate generation is done by
/// hand so that a given seed yields the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal();
  double exponential() ;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace brw
