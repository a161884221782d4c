#pragma once

#include <cstdint>
#include <random>

namespace ipursuit {

// Deterministic generator: mt19937_64 for raw bits (its output sequence is
// fixed by the standard), with uniform/normal transforms implemented here so
// streams do not depend on the standard library's distribution classes.
//
// Seed splitting: child(stream) = Rng(splitmix64(seed ^ splitmix64(stream + 1))).
// Each concurrent task gets its own child keyed by a task index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via the Marsaglia polar method.
  double normal();

  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ipursuit
