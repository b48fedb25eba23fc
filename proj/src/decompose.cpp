#include "ttsketch/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttsketch/errors.hpp"
#include "ttsketch/low_rank.hpp"

namespace ttsketch {

namespace {

struct StageOutput {
  Matrix basis;
  Matrix projected;
};

void require_order(const DenseTensor& t) {
  if (t.order() < 2) {
    throw InvalidArgument(fmt::format("TT decomposition needs order >= 2, got {}", t.order()));
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument(fmt::format("eps must lie in (0, 1), got {}", eps));
}

void require_ranks(const DenseTensor& t, std::span<const Index> ranks) {
  if (ranks.size() + 1 != t.order()) {
    throw InvalidArgument(fmt::format("expected {} ranks for an order-{} tensor, got {}",
                                      t.order() - 1, t.order(), ranks.size()));
  }
  for (Index r : ranks) {
    if (r < 1) throw InvalidArgument("TT ranks must be >= 1");
  }
}

// Left-to-right sweep shared by every algorithm. `stage(a, n, record)`
// returns an orthonormal basis of A_n and basis^T A_n; the projection
// becomes the next carry.
template <class StageFn>
Decomposition sweep(const DenseTensor& t, const TraceOptions& trace, StageFn&& stage) {
  require_order(t);
  const Dims& dims = t.dims();
  const Index order = t.order();
  std::vector<DenseTensor> cores;
  std::vector<StageRecord> records;
  Matrix carry;
  Index r_prev = 1;
  for (Index n = 0; n + 1 < order; ++n) {
    const Index rows = r_prev * dims[n];
    const Index cols = product(std::span<const Index>(dims).subspan(n + 1));
    const ConstMatrixMap a = n == 0 ? t.as_matrix(rows, cols)
                                    : ConstMatrixMap(carry.data(), static_cast<Eigen::Index>(rows),
                                                     static_cast<Eigen::Index>(cols));
    StageRecord rec;
    StageOutput out;
    try {
      out = stage(a, n, rec);
    } catch (const NumericError& e) {
      throw NumericError(fmt::format("stage {} ({}x{}): {}", n + 1, rows, cols, e.what()));
    }
    const Index r = static_cast<Index>(out.basis.cols());
    rec.rank = r;
    rec.norms.input_norm2 = a.squaredNorm();
    rec.norms.captured_norm2 = out.projected.squaredNorm();
    if (!out.projected.allFinite()) {
      throw NumericError(fmt::format("non-finite values after stage {}", n + 1));
    }
    if (trace.stage_residuals) rec.residual = (a - out.basis * out.projected).norm();
    cores.emplace_back(Dims{r_prev, dims[n], r},
                       std::vector<double>(out.basis.data(), out.basis.data() + out.basis.size()));
    records.push_back(rec);
    carry = std::move(out.projected);
    r_prev = r;
  }
  cores.emplace_back(Dims{r_prev, dims[order - 1], 1},
                     std::vector<double>(carry.data(), carry.data() + carry.size()));
  return Decomposition{TTTensor(std::move(cores)), std::move(records)};
}

Dims trailing_dims(const DenseTensor& t, Index n) {
  return Dims(t.dims().begin() + static_cast<std::ptrdiff_t>(n) + 1, t.dims().end());
}

// Clamp rank and sketch width to the unfolding; flags the record when hit.
std::pair<Index, Index> clamp_widths(Index rank, Index oversample, const MatrixRef& a,
                                     StageRecord& rec) {
  const auto limit = static_cast<Index>(std::min(a.rows(), a.cols()));
  Index width = rank + oversample;
  if (width > limit) {
    width = limit;
    rec.clamped = true;
  }
  if (rank > width) {
    rank = width;
    rec.clamped = true;
  }
  rec.sketch_cols = width;
  return {rank, width};
}

}  // namespace

bool Decomposition::clamped() const {
  return std::any_of(stages.begin(), stages.end(), [](const StageRecord& s) { return s.clamped; });
}

std::vector<StageNorms> Decomposition::stage_norms() const {
  std::vector<StageNorms> out;
  out.reserve(stages.size());
  for (const auto& s : stages) out.push_back(s.norms);
  return out;
}

double Decomposition::estimator() const {
  const auto norms = stage_norms();
  return error_estimate_gram(norms, 0.5, 1.0).value;
}

double stage_tolerance(double eps, double norm, Index order) {
  return eps * norm / std::sqrt(static_cast<double>(order - 1));
}

Decomposition tt_svd(const DenseTensor& t, double eps, const TraceOptions& trace) {
  require_eps(eps);
  require_order(t);
  const double delta = stage_tolerance(eps, frobenius_norm(t), t.order());
  return sweep(t, trace, [&](const ConstMatrixMap& a, Index, StageRecord&) {
    TruncationResult tr = svd_truncate_tol(a, delta);
    return StageOutput{std::move(tr.basis), std::move(tr.projected)};
  });
}

Decomposition tt_svd_fixed_rank(const DenseTensor& t, std::span<const Index> ranks,
                                const TraceOptions& trace) {
  require_order(t);
  require_ranks(t, ranks);
  return sweep(t, trace, [&](const ConstMatrixMap& a, Index n, StageRecord& rec) {
    const auto limit = static_cast<Index>(std::min(a.rows(), a.cols()));
    Index r = ranks[n];
    if (r > limit) {
      r = limit;
      rec.clamped = true;
    }
    TruncationResult tr = svd_truncate_rank(a, r);
    return StageOutput{std::move(tr.basis), std::move(tr.projected)};
  });
}

Decomposition rand_tt_fixed_rank(const DenseTensor& t, const FixedRankParams& p,
                                 const TraceOptions& trace) {
  require_order(t);
  require_ranks(t, p.ranks);
  return sweep(t, trace, [&](const ConstMatrixMap& a, Index n, StageRecord& rec) {
    const auto [rank, width] = clamp_widths(p.ranks[n], p.oversample, a, rec);
    SketchSpec spec;
    spec.kind = p.sketch;
    spec.rows = static_cast<Index>(a.cols());
    spec.cols = width;
    spec.factor_dims = trailing_dims(t, n);
    spec.seed = p.seed;
    spec.stream_id = n + 1;
    Matrix z = draw(spec).apply_right(a);
    for (unsigned i = 0; i < p.power; ++i) z = a * (a.transpose() * z);
    Matrix q = svd_truncate_rank(z, rank).basis;
    Matrix projected = q.transpose() * a;
    return StageOutput{std::move(q), std::move(projected)};
  });
}

Decomposition rand_tt_fixed_rank_gram(const DenseTensor& t, const FixedRankParams& p,
                                      const TraceOptions& trace) {
  if (p.power < 1) throw InvalidArgument("the Gram-power algorithm requires power >= 1");
  if (p.sketch != SketchKind::kGaussian) {
    throw InvalidArgument("the Gram-power algorithm uses a Gaussian sketch only");
  }
  require_order(t);
  require_ranks(t, p.ranks);
  return sweep(t, trace, [&](const ConstMatrixMap& a, Index n, StageRecord& rec) {
    const auto [rank, width] = clamp_widths(p.ranks[n], p.oversample, a, rec);
    SketchSpec spec;
    spec.kind = SketchKind::kGaussian;
    spec.rows = static_cast<Index>(a.rows());
    spec.cols = width;
    spec.seed = p.seed;
    spec.stream_id = n + 1;
    Matrix z = draw(spec).materialize();
    for (unsigned i = 0; i < p.power; ++i) z = a * (a.transpose() * z);
    Matrix q = svd_truncate_rank(z, rank).basis;
    Matrix projected = q.transpose() * a;
    return StageOutput{std::move(q), std::move(projected)};
  });
}

Decomposition adaptive_rand_tt(const DenseTensor& t, const FixedPrecisionParams& p,
                               const TraceOptions& trace) {
  require_eps(p.eps);
  require_order(t);
  if (p.block < 1) throw InvalidArgument("block size must be >= 1");
  const double delta = stage_tolerance(p.eps, frobenius_norm(t), t.order());
  return sweep(t, trace, [&](const ConstMatrixMap& a, Index n, StageRecord& rec) {
    SketchSpec family;
    family.kind = p.sketch;
    family.factor_dims = trailing_dims(t, n);
    Stream rng(p.seed, n + 1);
    RangeFinderResult rf = adapt_range_finder(a, delta, p.block, p.power, family, rng);
    rec.sketch_cols = rf.blocks * p.block;
    rec.clamped = rf.capped;
    return StageOutput{std::move(rf.basis), std::move(rf.projected)};
  });
}

std::vector<Vector> unfolding_spectra(const DenseTensor& t) {
  require_order(t);
  std::vector<Vector> out;
  for (Index n = 1; n < t.order(); ++n) out.push_back(singular_values(unfold_seq(t, n)));
  return out;
}

std::vector<Index> greedy_ranks_from_spectra(const std::vector<Vector>& spectra, double norm2,
                                             double eps) {
  require_eps(eps);
  const Index modes = spectra.size();
  if (modes == 0) throw InvalidArgument("greedy rank estimation needs at least one unfolding");
  const double delta = stage_tolerance(eps, std::sqrt(norm2), modes + 1);
  const double delta2 = delta * delta;

  // tail2[j][k] = sum_{i >= k} sigma_i^2 (0-based), so the tail beyond a
  // rank mu is tail2[j][mu].
  std::vector<Vector> tail2;
  for (const auto& s : spectra) {
    const Vector t = tail_norms(s);
    tail2.push_back(t.array().square().matrix());
  }
  std::vector<Index> mu(modes, 1);
  auto total_tail = [&] {
    double sum = 0.0;
    for (Index j = 0; j < modes; ++j) sum += tail2[j](static_cast<Eigen::Index>(mu[j]));
    return sum;
  };
  while (total_tail() >= delta2) {
    std::optional<Index> best;
    double best_value = 0.0;
    for (Index j = 0; j < modes; ++j) {
      const auto full = static_cast<Index>(spectra[j].size());
      if (mu[j] >= full) continue;
      const Index pos = kGreedyUseNextSigma ? mu[j] : mu[j] - 1;
      const double v = spectra[j](static_cast<Eigen::Index>(pos));
      // Strict comparison keeps the smallest index on ties.
      if (!best || v > best_value) {
        best = j;
        best_value = v;
      }
    }
    if (!best) break;
    ++mu[*best];
  }
  return mu;
}

std::vector<Index> greedy_tt_rank(const DenseTensor& t, double eps) {
  require_eps(eps);
  const auto spectra = unfolding_spectra(t);
  return greedy_ranks_from_spectra(spectra, frobenius_norm2(t.data()), eps);
}

GramEstimate error_estimate_gram(std::span<const StageNorms> stages, double eps, double rel_target) {
  GramEstimate out;
  for (const auto& s : stages) out.value += std::max(0.0, s.input_norm2 - s.captured_norm2);
  if (rel_target > 0.0 && !stages.empty()) {
    const double floor = std::sqrt(4.0 * static_cast<double>(stages.size()) *
                                   std::numeric_limits<double>::epsilon() / rel_target);
    out.fp_floor_ok = eps > floor;
  }
  return out;
}

}  // namespace ttsketch
