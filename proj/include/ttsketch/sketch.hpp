#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/rng.hpp"

namespace ttsketch {

enum class SketchKind {
  kGaussian,       ///< i.i.d. standard normal entries
  kKhatriRao,      ///< columnwise Kronecker of per-mode Gaussian factors
  kKronecker,      ///< Kronecker of per-mode Gaussian factors, leading columns kept
  kCountSketch,    ///< sparse embedding, one random +-1 per row
  kSubsampledDct,  ///< random signs, orthonormal DCT-II, column sampling
};

/// CLI vocabulary: gaussian | kr-gaussian | kron-gaussian | spemb | sdct.
std::string_view to_string(SketchKind kind);
/// Throws InvalidArgument for unknown names.
SketchKind parse_sketch_kind(std::string_view name);

/// Description of a random test matrix Omega of shape rows x cols.
struct SketchSpec {
  SketchKind kind = SketchKind::kGaussian;
  Index rows = 0;
  Index cols = 0;
  /// Structured kinds: per-mode extents whose product is `rows`, listed in
  /// mode order (first entry varies fastest along the rows). Empty means a
  /// single factor of extent `rows`.
  Dims factor_dims;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/**
 * A realized sketch. Only the compact representation is stored: a dense
 * matrix for Gaussian, per-mode factors for the Khatri-Rao and Kronecker
 * kinds, hash/sign arrays for CountSketch and sign/sample arrays for SDCT.
 */
class SketchOperator {
 public:
  struct Dense {
    Matrix omega;
  };
  /// Column c of Omega is the Kronecker product of factors[m](:, c), with
  /// factor 0 varying fastest. Kronecker sketches are stored in this form
  /// after expanding each factor to the kept column set.
  struct KhatriRao {
    std::vector<Matrix> factors;
  };
  struct CountSketch {
    std::vector<Index> bucket;
    std::vector<double> sign;
  };
  struct Dct {
    std::vector<double> sign;
    std::vector<Index> sample;
    double scale = 1.0;
  };
  using Representation = std::variant<Dense, KhatriRao, CountSketch, Dct>;

  SketchOperator(SketchKind kind, Index rows, Index cols, Representation rep);

  SketchKind kind() const noexcept { return kind_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  const Representation& representation() const noexcept { return rep_; }

  /// Explicit rows x cols matrix.
  Matrix materialize() const;

  /// a * Omega through the kind's fast path. Requires a.cols() == rows().
  Matrix apply_right(const MatrixRef& a) const;

 private:
  SketchKind kind_;
  Index rows_;
  Index cols_;
  Representation rep_;
};

/// Per-mode column count L for a Kronecker sketch: the smallest L with
/// L^modes >= cols.
Index kronecker_factor_width(Index cols, Index modes);

/// Draw from a fresh stream keyed by (spec.seed, spec.stream_id).
SketchOperator draw(const SketchSpec& spec);
/// Draw continuing an existing stream; seed/stream_id in spec are ignored.
SketchOperator draw(const SketchSpec& spec, Stream& rng);

/**
 * a * (Khatri-Rao of factors) without forming the Khatri-Rao matrix.
 *
 * `a` has front_rows rows and prod_m factors[m].rows() columns, the trailing
 * index split into modes with factor 0 fastest. The last mode is contracted
 * for all columns at once with one matrix product, then each column is
 * reduced by one matrix-vector product per remaining mode.
 */
Matrix apply_kr_via_tenvecmult(const MatrixRef& a, const std::vector<Matrix>& factors);

/// Same, for a tensor whose leading modes multiply to front_rows.
Matrix apply_kr_via_tenvecmult(const DenseTensor& t, Index front_rows,
                               const std::vector<Matrix>& factors);

}  // namespace ttsketch
