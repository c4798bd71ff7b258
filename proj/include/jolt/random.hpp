#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

#include <Eigen/Dense>

namespace jolt {

/// Counter-style random stream: every consumer derives its own stream from a
/// base seed plus a key path (run, time, purpose, entity), so draws never
/// depend on scheduling or on how many draws other consumers made.
///
/// Generator is xoshiro256++ seeded through SplitMix64.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) { seed_state(seed); }

  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = seed;
    for (std::uint64_t p : path) h = mix(h ^ (p + 0x9e3779b97f4a7c15ULL));
    seed_state(h);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller; two uniforms per call, no cached spare).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Poisson count by Knuth's product method; fine for the small means used here.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  std::size_t uniform_index(std::size_t n) {
    // Modulo bias is negligible for n << 2^64.
    return static_cast<std::size_t>(next_u64() % static_cast<std::uint64_t>(n));
  }

  Eigen::Vector2d in_disc(double radius) {
    const double r = radius * std::sqrt(uniform());
    const double th = 2.0 * M_PI * uniform();
    return {r * std::cos(th), r * std::sin(th)};
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void seed_state(std::uint64_t h) {
    for (auto& s : s_) {
      h = mix(h);
      s = h;
    }
  }

  std::uint64_t s_[4]{};
};

/// Purpose tags for substream derivation. Keeping them in one enum makes
/// collisions between consumers impossible by construction.
enum class Rng : std::uint64_t {
  kTruthTargets = 1,
  kNav,
  kLinks,
  kMot,
  kClutter,
  kShuffle,
  kInitAgent,
  kAgentPredict,
  kPtPredict,
  kBirth,
  kResampleSelfLoc,
  kResamplePt,
  kResampleNewPt,
  kResampleAgent,
};

inline RandomStream substream(std::uint64_t seed, std::uint64_t run, std::uint64_t t,
                              Rng purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
  return RandomStream(seed, {run, t, static_cast<std::uint64_t>(purpose), a, b});
}

}  // namespace jolt
