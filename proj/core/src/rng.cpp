#include "netgame/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace netgame {

namespace {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

uint64_t derive_stream(uint64_t base_seed, uint64_t stream_index) {
  return mix64(base_seed + (stream_index + 1) * 0x9E3779B97F4A7C15ULL);
}

Rng::Rng(uint64_t seed) : engine_(mix64(seed + 0x9E3779B97F4A7C15ULL)) {}

uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Rng::normal(double mu, double sd) {
  // Marsaglia polar method; rejection keeps only points inside the unit
  // disk, then one of the two independent normals is returned.
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return mu + sd * u * std::sqrt(-2.0 * std::log(s) / s);
}

bool Rng::bernoulli(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0, 1]");
  return uniform01() < p;
}

int Rng::categorical(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("categorical: empty probability vector");
  const double u = uniform01();
  double cum = 0.0;
  for (size_t k = 0; k + 1 < probs.size(); ++k) {
    cum += probs[k];
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace netgame
