#include "ttsketch/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ttsketch {

namespace {

// Central branch of AS241, |p - 0.5| <= 0.425. Shared by the scalar and
// batched paths so both round identically.
inline double central_branch(double q) {
  const double r = 0.180625 - q * q;
  return q *
         (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
               67265.770927008700853) * r + 45921.953931549871457) * r +
             13731.693765509461125) * r + 1971.5909503065514427) * r +
           133.14166789178437745) * r + 3.387132872796366608) /
         (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
               39307.89580009271061) * r + 21213.794301586595867) * r +
             5394.1960214247511077) * r + 687.1870074920579083) * r +
           42.313330701600911252) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
  // Wichura, Algorithm AS241 (PPND16).
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) return central_branch(q);
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : key_(mix64(seed ^ mix64(stream_id + 0x632be59bd9b4e019ULL))) {}

std::uint64_t Stream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Stream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() noexcept { return inverse_normal_cdf(uniform()); }

void Stream::fill_normal(std::span<double> out) noexcept {
  constexpr std::size_t kChunk = 256;
  std::array<double, kChunk> u;
  for (std::size_t base = 0; base < out.size(); base += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - base);
    double* o = out.data() + base;
    for (std::size_t i = 0; i < n; ++i) u[i] = uniform();
    // Branch-free pass over every sample, then patch the tails.
    for (std::size_t i = 0; i < n; ++i) o[i] = central_branch(u[i] - 0.5);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(u[i] - 0.5) > 0.425) o[i] = inverse_normal_cdf(u[i]);
    }
  }
}

__extension__ using u128 = unsigned __int128;

std::uint64_t Stream::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection; deterministic per counter.
  for (;;) {
    const u128 m = static_cast<u128>(next_u64()) * static_cast<u128>(n);
    const auto low = static_cast<std::uint64_t>(m);
    if (low >= n || low >= (-n) % n) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

double Stream::sign() noexcept { return (next_u64() >> 63) != 0 ? -1.0 : 1.0; }

}  // namespace ttsketch
