#pragma once

#include <cstdint>
#include <random>

#include "kinlab/state.hpp"

namespace kinlab {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded splittable generator: child streams are derived by splitmix64
/// mixing of the parent seed with a stream key, so independent sampling
/// loops stay reproducible without sharing one engine. The exact stream is
/// implementation-defined; checks must not depend on particular draws.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(scramble(seed)) {}

  Rng split(std::uint64_t key) const {
    std::uint64_t s = seed_ ^ (0xA5A5A5A5DEADBEEFULL + key * 0x9E3779B97F4A7C15ULL);
    return Rng(splitmix64(s));
  }

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  std::mt19937_64& engine() { return eng_; }

private:
  static std::uint64_t scramble(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
  }
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Smooth random state: lowest kx_max x-modes times the lowest mv_max
/// Hermite-like v-modes, each component weighted by its profile so the
/// weighted norms stay finite. Used wherever inequalities are sampled.
DistributionPair band_limited_sample(Rng& rng, const PhaseGrid& grid,
                                     const VelocityProfile& chi1,
                                     const VelocityProfile& chi2,
                                     int kx_max = 8, int mv_max = 8);

} // namespace kinlab
