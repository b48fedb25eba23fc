#pragma once

#include <span>

#include "ttsketch/dense_tensor.hpp"

namespace ttsketch {

/// ||a - b||_F / ||a||_F. Throws InvalidArgument on a zero-norm reference.
double relative_error(const DenseTensor& a, const DenseTensor& b);

inline double fit(const DenseTensor& a, const DenseTensor& b) { return 1.0 - relative_error(a, b); }

/// Largest tensor tt_svd_bound_oracle will decompose.
inline constexpr Index kOracleEntryLimit = 1'000'000;

/**
 * sqrt(sum_n sum_{i > ranks[n]} sigma_i(A_([n]))^2) from full SVDs of every
 * sequential unfolding. Ranks beyond an unfolding's min-dimension count as
 * full. Throws ResourceLimit above kOracleEntryLimit entries.
 */
double tt_svd_bound_oracle(const DenseTensor& t, std::span<const Index> ranks);

}  // namespace ttsketch
