#ifndef SERI_RNG_HPP
#define SERI_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace seri {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for replica `r` of a run seeded with `master`:
///   mix64(master ^ mix64(r + 0x9e3779b97f4a7c15)).
/// Replica streams depend only on (master, r), never on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t r) noexcept {
  return mix64(master ^ mix64(r + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based 64-bit generator.
///
/// State is the pair (key, counter). Output i is mix64(key + i * golden),
/// i.e. SplitMix64 viewed as a keyed counter, so any position of the stream
/// can be reproduced from (key, counter) alone. Satisfies
/// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  explicit constexpr CounterRng(std::uint64_t seed = 0) noexcept : key_(mix64(seed)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1].
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  /// Unit-rate exponential.
  double exp1() noexcept { return -std::log(uniform_pos()); }

  double exponential(double rate) noexcept { return exp1() / rate; }

  /// Unbiased integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace seri

#endif  // SERI_RNG_HPP
