// Seeded deterministic randomness for simulations and learning runs.
//
// Generator: xoshiro256** seeded through SplitMix64, so a 64-bit seed
// reproduces the exact same sample sequence on every run and platform.
// Independent streams are derived with split(key): the child seed is the
// SplitMix64 finalizer applied to (parent_seed + GOLDEN * (key + 1)), which
// maps distinct keys of one parent to distinct child states.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikerl {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {
    // SplitMix64 expansion of the seed into the 256-bit xoshiro state.
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += detail::kGolden;
      word = detail::splitmix64_mix(sm);
    }
  }

  std::uint64_t seed() const { return seed_; }

  // xoshiro256** core step.
  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Child stream keyed off this stream's seed. Independent of how many
  // draws the parent has made.
  RngStream split(std::uint64_t key) const {
    return RngStream(detail::splitmix64_mix(seed_ + detail::kGolden * (key + 1)));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Gumbel(0,1) transform of a uniform draw: -log(-log u), u in (0,1).
inline double gumbel_from_uniform(double u) {
  return -std::log(-std::log(u));
}

inline double gumbel_sample(RngStream& rng) {
  double u = rng.uniform01();
  // Keep u strictly inside (0,1) so both logs stay finite.
  if (u < 1e-12) u = 1e-12;
  if (u > 1.0 - 1e-12) u = 1.0 - 1e-12;
  return gumbel_from_uniform(u);
}

// Returns +1 with probability p, -1 otherwise.
inline int sample_bernoulli(double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_bernoulli: probability outside [0,1]");
  }
  return rng.uniform01() < p ? +1 : -1;
}

inline int sample_categorical(std::span<const double> probs, RngStream& rng) {
  if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("sample_categorical: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("sample_categorical: probabilities do not sum to 1");
  }
  const double u = rng.uniform01() * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

// Box-Muller, two uniforms per draw (no cached second value, so the
// stream advance per call is fixed).
inline double sample_gaussian(double mu, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_gaussian: sigma must be > 0");
  double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return mu + sigma * r * std::cos(kTwoPi * u2);
}

// Knuth's product-of-uniforms Poisson sampler; fine for the modest rates
// used here.
inline int sample_poisson(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("sample_poisson: rate must be >= 0");
  const double limit = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform01();
  } while (p > limit);
  return k - 1;
}

}  // namespace spikerl
