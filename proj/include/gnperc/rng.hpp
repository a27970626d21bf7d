#pragma once

// Counter-based splittable random number generation.
//
// Every random quantity in the toolkit is drawn from a stream keyed by
// (seed, purpose, block...) so that parallel generation is order- and
// thread-count-independent: a stream's output depends only on its key and
// how many values have been drawn from it, never on other streams.

#include <cstdint>
#include <cmath>

namespace gnp::rng {

// SplitMix64 finalizer. Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Derive a stream key by absorbing words into the seed one at a time.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a) {
  return mix64(seed + kGolden * (a + 1));
}
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b) {
  return derive_key(derive_key(seed, a), b);
}
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b, std::uint64_t c) {
  return derive_key(derive_key(seed, a, b), c);
}

// Output i of a stream with key k is mix64(k + (i+1)*golden), i.e. the
// SplitMix64 sequence started at k. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) : state_(key) {}
  Stream(std::uint64_t seed, std::uint64_t a) : state_(derive_key(seed, a)) {}
  Stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
      : state_(derive_key(seed, a, b)) {}
  Stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
      : state_(derive_key(seed, a, b, c)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Exponential with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Standard normal, Box-Muller with a one-value cache.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Exact Poisson draw. Multiplication method for small means; larger
  // means are split into independent small-mean pieces (Poisson additivity).
  std::uint64_t poisson(double mean) {
    std::uint64_t n = 0;
    while (mean > 32.0) {
      n += poisson_small(32.0);
      mean -= 32.0;
    }
    return n + poisson_small(mean);
  }

 private:
  std::uint64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double threshold = std::exp(-mean);
    std::uint64_t n = 0;
    double prod = uniform();
    while (prod > threshold) {
      ++n;
      prod *= uniform();
    }
    return n;
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace gnp::rng
