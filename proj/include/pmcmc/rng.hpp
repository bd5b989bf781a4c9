#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pmcmc {

// One SplitMix64 step; used to spread seed material across streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Box-Muller map from two uniforms. Pure so the transform can be checked
// against hand-picked inputs; callers are responsible for v1 > 0.
inline double boxmuller(double v1, double v2, double mean = 0.0, double sd = 1.0) {
  return mean + sd * std::sqrt(-2.0 * std::log(v1)) *
                    std::cos(2.0 * std::numbers::pi * v2);
}

// Deterministic splittable random stream. The same (seed, stream_id) always
// replays the same sequence; distinct stream ids give unrelated sequences, so
// every Monte Carlo replicate, filter invocation and worker thread can own an
// independent stream of the same master seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t state = seed;
    splitmix64(state);  // decorrelate small seeds
    state ^= 0xD1B54A32D192ED03ull * (stream_id + 1);
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
      std::uint64_t w = splitmix64(state);
      words[2 * i] = static_cast<std::uint32_t>(w);
      words[2 * i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words, words + 8);
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Derive an independent child stream; stable under (seed, stream_id, idx).
  RngStream substream(std::uint64_t idx) const {
    std::uint64_t state = stream_id_ ^ (0x9E3779B97F4A7C15ull * (idx + 1));
    return RngStream(seed_, splitmix64(state));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); zero is resampled.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Uniform on the open interval (a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform_open(); }

  // Exp(1) draw.
  double exponential() { return -std::log(uniform_open()); }

  // Gaussian draw via Box-Muller; v1 = 0 is resampled so the log stays finite.
  double gaussian(double mean = 0.0, double sd = 1.0) {
    if (!(sd > 0.0)) throw std::domain_error("gaussian: sd must be positive");
    return boxmuller(uniform_open(), uniform(), mean, sd);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace pmcmc
