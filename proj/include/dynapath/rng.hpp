#pragma once

#include <cstdint>
#include <random>

namespace dynapath {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Range reduction is done here rather than through the <random>
/// distributions, which are implementation-defined, so a seed reproduces the
/// same draws on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform() < p; }

  /// Independent child stream; advances this stream by one draw.
  Rng fork() { return Rng(next() ^ 0x9E3779B97F4A7C15ULL); }

private:
  std::mt19937_64 engine_;
};

} // namespace dynapath
