#pragma once

#include <cstdint>
#include <limits>

namespace pam {

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Seed of sub-stream `stream` of `master`. Independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream * kGoldenGamma + 0x632be59bd9b4e019ULL));
}

/// Uniform double in the open interval (0, 1) from 52 random bits.
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Counter-based generator: draw k is mix64(key + k * gamma). Any draw can be
/// computed directly from (key, k), so streams never depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) : key_(mix64(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type at(std::uint64_t k) const { return mix64(key_ + k * kGoldenGamma); }
  constexpr result_type operator()() { return at(counter_++); }

  double uniform() { return to_open_unit((*this)()); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pam
