#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace vsloc {

namespace detail {

// splitmix64 finalizer; full-period mixing of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace detail

/// Deterministic counter-based random stream.  Streams are derived by key
/// words rather than by drawing order, so two runs that derive the same
/// (seed, key...) chain produce identical values no matter how work is
/// split across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : state_(detail::mix64(seed + detail::kGolden)) {}

  /// Child stream keyed by `word`; statistically independent of the parent
  /// and of siblings with different words.
  [[nodiscard]] RngStream derive(std::uint64_t word) const {
    RngStream child(0);
    child.state_ =
        detail::mix64(state_ ^ detail::mix64(word * 0xd6e8feb86659fd93ull +
                                             0x2545f4914f6cdd1dull));
    return child;
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    using u128 = unsigned __int128;
    return static_cast<int>(
        (u128(next_u64()) * u128(static_cast<std::uint64_t>(n))) >> 64);
  }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    // u1 on (0, 1] so the log is finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

 private:
  std::uint64_t state_;
};

}  // namespace vsloc
