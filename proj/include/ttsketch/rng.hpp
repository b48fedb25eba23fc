#pragma once

#include <cstdint>
#include <span>

namespace ttsketch {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Inverse of the standard normal CDF (Wichura AS241, ~1e-16 relative).
/// p must lie in (0, 1).
double inverse_normal_cdf(double p);

/**
 * Counter-based random stream.
 *
 * The k-th output is a pure function of (seed, stream_id, k): the key is
 * derived from seed and stream_id, and output k is mix64(key + (k+1)*gamma).
 * Streams with different ids are independent, so a consumer can be handed
 * "stream n" without caring how much any other stream was consumed.
 */
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  /// Standard normal via inverse CDF of uniform().
  double normal() noexcept;

  /// Fills `out` with the same values as out.size() calls to normal().
  void fill_normal(std::span<double> out) noexcept;

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Random sign, +1.0 or -1.0.
  double sign() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }
  void discard(std::uint64_t n) noexcept { counter_ += n; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ttsketch
