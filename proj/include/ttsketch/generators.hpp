#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/rng.hpp"
#include "ttsketch/tt_tensor.hpp"

namespace ttsketch {

enum class GenFamily { kTTNoise, kTTSnr, kFuncSin, kFuncHilbert };

std::string_view to_string(GenFamily f);
/// Accepts "tt-noise", "tt-snr", "func-sin", "func-hilbert".
GenFamily parse_gen_family(std::string_view name);

struct GenSpec {
  GenFamily family = GenFamily::kTTNoise;
  Dims dims;                     ///< tt-* families
  std::vector<Index> core_ranks;  ///< tt-* families
  double gamma = 0.0;            ///< tt-noise
  double snr_db = 0.0;           ///< tt-snr
  Index extent = 40;             ///< func-* families (order 5)
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument when a field the family needs is missing or bad.
void validate(const GenSpec& spec);
DenseTensor generate(const GenSpec& spec);

/// TT with i.i.d. standard normal cores drawn from `rng`. With
/// left_orthonormal, cores 1..N-1 are replaced by the Q factor of their
/// matricization (needs r_{n-1} I_n >= r_n).
TTTensor random_tt(const Dims& dims, std::span<const Index> ranks, Stream& rng,
                   bool left_orthonormal = false);

/// Standard normal tensor.
DenseTensor random_dense(const Dims& dims, Stream& rng);

/// P + (gamma ||P||_F / sqrt(prod dims)) N with P from Gaussian TT cores.
DenseTensor gen_tt_noise(const Dims& dims, std::span<const Index> core_ranks, double gamma,
                         std::uint64_t seed);

/// P + beta N with beta chosen so that ||P||_F^2 / ||beta N||_F^2 is snr_db decibels.
DenseTensor gen_tt_snr(const Dims& dims, std::span<const Index> core_ranks, double snr_db,
                       std::uint64_t seed);

/// sin(sqrt(sum_k x_k^2)) on the grid x_k = (i_k - 1)/(I - 1), order 5.
DenseTensor gen_func_sin(Index extent);

/// (I - 1)/(I + i_1 + ... + i_5) with 1-based indices, order 5.
DenseTensor gen_func_hilbert(Index extent);

}  // namespace ttsketch
