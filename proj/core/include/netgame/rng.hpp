#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace netgame {

// Derives an independent stream seed from a base seed and a stream index.
//
// The derivation is the SplitMix64 finalizer applied to
// base + (index + 1) * 0x9E3779B97F4A7C15 (the 64-bit golden ratio), so
// streams for distinct indices are decorrelated and the mapping is stable
// across platforms.  Nesting calls yields sub-streams:
//   derive_stream(derive_stream(base, rep), kind)
uint64_t derive_stream(uint64_t base_seed, uint64_t stream_index);

// Deterministic random source with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++
// standard, seeded with a single SplitMix64-mixed 64-bit value.  All
// variate transforms are implemented here rather than delegated to
// <random> distributions (whose algorithms are implementation-defined):
//
//   uniform01   takes the top 53 bits of one engine draw, result in [0, 1)
//   uniform     affine map of uniform01
//   normal      Marsaglia polar method; one value returned per call, the
//               second value of each accepted pair is discarded
//   bernoulli   uniform01() < p
//   categorical inverse-CDF walk over one uniform01 draw
//
// Given the same seed, the draw sequence is identical on every platform
// up to libm rounding in log/sqrt (normal variates only).
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform on [a, b).
  double uniform(double a, double b);

  // Normal with mean mu and standard deviation sd.
  double normal(double mu = 0.0, double sd = 1.0);

  // Returns true with probability p.
  bool bernoulli(double p);

  // Samples an index from a probability vector (entries must be
  // non-negative; they are treated as summing to one).  Consumes exactly
  // one uniform draw.
  int categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

}  // namespace netgame
