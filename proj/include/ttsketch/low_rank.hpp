#pragma once

#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/rng.hpp"
#include "ttsketch/sketch.hpp"

namespace ttsketch {

/// Outcome of truncating a matrix M to a leading left singular subspace.
struct TruncationResult {
  /// Orthonormal left factor, rows(M) x rank.
  Matrix basis;
  Index rank = 0;
  /// Retained singular values, nonincreasing.
  Vector sigma;
  /// sqrt of the sum of squared discarded singular values.
  double tail = 0.0;
  /// basis^T M (equals Sigma V^T of the retained part).
  Matrix projected;
};

/// Aspect ratio beyond which singular values come from the smaller Gram matrix.
inline constexpr double kGramAspectRatio = 4.0;

/// All min(rows, cols) singular values, nonincreasing.
Vector singular_values(const MatrixRef& m);

/// tails[k] = sqrt(sum_{i >= k} sigma_i^2) for k = 0..size; tails[size] = 0.
Vector tail_norms(const Vector& sigma);

/// Smallest rank r >= 1 whose discarded tail is <= tol.
TruncationResult svd_truncate_tol(const MatrixRef& m, double tol);

/// Best rank-r approximation; 1 <= r <= min(rows, cols).
TruncationResult svd_truncate_rank(const MatrixRef& m, Index rank);

/// Orthonormal basis of the column span; throws DegenerateInput when the
/// columns are numerically dependent.
Matrix orthonormalize(const MatrixRef& m);

struct RangeFinderResult {
  Matrix basis;      ///< orthonormal columns
  Matrix projected;  ///< basis^T A
  double input_norm2 = 0.0;     ///< ||A||_F^2
  double captured_norm2 = 0.0;  ///< ||basis^T A||_F^2
  Index blocks = 0;
  bool capped = false;  ///< stopped at min(rows, cols) columns

  /// Tracked residual ||A||^2 - ||Q^T A||^2, clamped at 0.
  double estimate() const { return input_norm2 > captured_norm2 ? input_norm2 - captured_norm2 : 0.0; }
};

/**
 * Blocked adaptive range finder.
 *
 * Grows Q in blocks of `block` columns drawn from `family` (its kind and
 * factor_dims are used; rows/cols are set per block) until the tracked
 * residual ||A||_F^2 - ||Q^T A||_F^2 drops to tol^2, or Q reaches
 * min(rows, cols) columns. Each block is Y = (A A^T)^power A Omega,
 * deflated twice against Q and orthonormalized with column pivoting;
 * directions whose ||q^T A|| is at round-off level are dropped.
 * The power iteration is not re-orthonormalized, so keep power <= 2.
 */
RangeFinderResult adapt_range_finder(const MatrixRef& a, double tol, Index block, unsigned power,
                                     const SketchSpec& family, Stream& rng);

}  // namespace ttsketch
