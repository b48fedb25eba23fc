#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/sketch.hpp"
#include "ttsketch/tt_tensor.hpp"

namespace ttsketch {

/// Squared norms of one stage's unfolding before and after projection.
struct StageNorms {
  double input_norm2 = 0.0;     ///< ||A_n||_F^2
  double captured_norm2 = 0.0;  ///< ||Q_n^T A_n||_F^2
};

struct StageRecord {
  Index rank = 0;
  Index sketch_cols = 0;  ///< columns of Omega_n (0 for deterministic stages)
  StageNorms norms;
  /// ||A_n - Q_n Q_n^T A_n||_F, filled only when TraceOptions::stage_residuals.
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool clamped = false;  ///< requested rank or sketch width exceeded the unfolding
};

struct Decomposition {
  TTTensor tt;
  std::vector<StageRecord> stages;

  std::vector<Index> ranks() const { return tt.ranks(); }
  bool clamped() const;
  /// Sum over stages of ||A_n||^2 - ||Q_n^T A_n||^2.
  double estimator() const;
  std::vector<StageNorms> stage_norms() const;
};

struct TraceOptions {
  /// Recompute ||A_n - Q_n Q_n^T A_n||_F directly at every stage.
  bool stage_residuals = false;
};

struct FixedRankParams {
  std::vector<Index> ranks;
  Index oversample = 10;
  unsigned power = 0;
  SketchKind sketch = SketchKind::kGaussian;
  std::uint64_t seed = 0;
};

struct FixedPrecisionParams {
  double eps = 0.1;
  Index block = 10;
  unsigned power = 0;
  SketchKind sketch = SketchKind::kGaussian;
  std::uint64_t seed = 0;
};

/// Per-stage truncation tolerance eps * ||A||_F / sqrt(N - 1).
double stage_tolerance(double eps, double norm, Index order);

/// Deterministic TT-SVD with relative accuracy eps.
Decomposition tt_svd(const DenseTensor& t, double eps, const TraceOptions& trace = {});

/// TT-SVD truncating stage n to min(ranks[n], unfolding min-dimension).
Decomposition tt_svd_fixed_rank(const DenseTensor& t, std::span<const Index> ranks,
                                const TraceOptions& trace = {});

/**
 * Randomized TT with prescribed ranks: at stage n, Z_n = (A_n A_n^T)^q A_n
 * Omega_n with Omega_n of width ranks[n] + oversample over the trailing
 * modes, and Q_n the leading ranks[n] left singular vectors of Z_n. The
 * sketch for stage n comes from stream n + 1 of p.seed.
 */
Decomposition rand_tt_fixed_rank(const DenseTensor& t, const FixedRankParams& p,
                                 const TraceOptions& trace = {});

/// Gram-power variant: Z_n = (A_n A_n^T)^q Omega_n with a Gaussian Omega_n
/// on the row side of A_n. Requires q >= 1.
Decomposition rand_tt_fixed_rank_gram(const DenseTensor& t, const FixedRankParams& p,
                                      const TraceOptions& trace = {});

/// Adaptive randomized TT: each stage runs the blocked range finder at the
/// per-stage tolerance.
Decomposition adaptive_rand_tt(const DenseTensor& t, const FixedPrecisionParams& p,
                               const TraceOptions& trace = {});

/// Select by the last retained singular value sigma_{mu_j} (false) or the
/// first discarded one sigma_{mu_j + 1} (true).
inline constexpr bool kGreedyUseNextSigma = false;

/// Singular values of every sequential unfolding A_([n]), n = 1..N-1.
std::vector<Vector> unfolding_spectra(const DenseTensor& t);

/// Greedy eps-TT-rank from precomputed spectra and ||A||_F^2.
std::vector<Index> greedy_ranks_from_spectra(const std::vector<Vector>& spectra, double norm2,
                                             double eps);

/// Greedy eps-TT-rank estimation (ranks only, no cores).
std::vector<Index> greedy_tt_rank(const DenseTensor& t, double eps);

struct GramEstimate {
  double value = 0.0;
  /// True when the floating-point analysis certifies `value` to relative
  /// accuracy rel_target, i.e. eps > sqrt(4 (N-1) eps_mach / rel_target).
  bool fp_floor_ok = false;
};

GramEstimate error_estimate_gram(std::span<const StageNorms> stages, double eps, double rel_target);

}  // namespace ttsketch
