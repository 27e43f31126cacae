#pragma once

#include <cstdint>
#include <random>

namespace wf {

/// Deterministic stream derivation so parallel rollouts reproduce the
/// single-threaded trajectory bit-for-bit.
uint64_t mix_seed(uint64_t base, uint64_t stream, uint64_t index);

/// mt19937_64 wrapper with pinned uniform/normal transforms (the standard
/// distributions are implementation-defined, which would break cross-build
/// reproducibility).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller.
  double gaussian();

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace wf
