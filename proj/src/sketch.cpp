#include "ttsketch/sketch.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

Matrix draw_gaussian(Index rows, Index cols, Stream& rng) {
  Matrix m(rows, cols);
  rng.fill_normal(std::span<double>(m.data(), static_cast<std::size_t>(m.size())));
  return m;
}

// Orthonormal DCT-II weight for frequency k of a length-n transform.
double dct_weight(Index k, Index n) {
  return std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
}

Matrix materialize_kr(const std::vector<Matrix>& factors, Index rows, Index cols) {
  Matrix out(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    Vector col = factors.front().col(static_cast<Eigen::Index>(c));
    for (Index m = 1; m < factors.size(); ++m) {
      col = kron(factors[m].col(static_cast<Eigen::Index>(c)), col);
    }
    out.col(static_cast<Eigen::Index>(c)) = col;
  }
  return out;
}

Matrix contiguous(const MatrixRef& a) { return a; }

}  // namespace

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::kGaussian: return "gaussian";
    case SketchKind::kKhatriRao: return "kr-gaussian";
    case SketchKind::kKronecker: return "kron-gaussian";
    case SketchKind::kCountSketch: return "spemb";
    case SketchKind::kSubsampledDct: return "sdct";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  for (auto k : {SketchKind::kGaussian, SketchKind::kKhatriRao, SketchKind::kKronecker,
                 SketchKind::kCountSketch, SketchKind::kSubsampledDct}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument(fmt::format(
      "unknown sketch kind '{}' (expected gaussian, kr-gaussian, kron-gaussian, spemb, sdct)", name));
}

Index kronecker_factor_width(Index cols, Index modes) {
  if (modes == 0) throw InvalidArgument("Kronecker sketch needs at least one mode");
  Index width = 1;
  for (;;) {
    Index reach = 1;
    for (Index m = 0; m < modes && reach < cols; ++m) reach *= width;
    if (reach >= cols) return width;
    ++width;
  }
}

SketchOperator::SketchOperator(SketchKind kind, Index rows, Index cols, Representation rep)
    : kind_(kind), rows_(rows), cols_(cols), rep_(std::move(rep)) {}

Matrix SketchOperator::materialize() const {
  const auto r = static_cast<Eigen::Index>(rows_);
  const auto c = static_cast<Eigen::Index>(cols_);
  if (const auto* d = std::get_if<Dense>(&rep_)) return d->omega;
  if (const auto* kr = std::get_if<KhatriRao>(&rep_)) return materialize_kr(kr->factors, rows_, cols_);
  if (const auto* cs = std::get_if<CountSketch>(&rep_)) {
    Matrix out = Matrix::Zero(r, c);
    for (Index j = 0; j < rows_; ++j) {
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(cs->bucket[j])) = cs->sign[j];
    }
    return out;
  }
  const auto& dct = std::get<Dct>(rep_);
  Matrix out(r, c);
  const double n = static_cast<double>(rows_);
  for (Index k = 0; k < cols_; ++k) {
    const Index freq = dct.sample[k];
    const double w = dct.scale * dct_weight(freq, rows_);
    for (Index j = 0; j < rows_; ++j) {
      const double angle = std::numbers::pi * (2.0 * static_cast<double>(j) + 1.0) *
                           static_cast<double>(freq) / (2.0 * n);
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          w * dct.sign[j] * std::cos(angle);
    }
  }
  return out;
}

Matrix SketchOperator::apply_right(const MatrixRef& a) const {
  if (static_cast<Index>(a.cols()) != rows_) {
    throw InvalidArgument(fmt::format("sketch has {} rows but the matrix has {} columns", rows_,
                                      a.cols()));
  }
  const auto c = static_cast<Eigen::Index>(cols_);
  if (const auto* d = std::get_if<Dense>(&rep_)) return a * d->omega;
  if (const auto* kr = std::get_if<KhatriRao>(&rep_)) return apply_kr_via_tenvecmult(a, kr->factors);
  if (const auto* cs = std::get_if<CountSketch>(&rep_)) {
    Matrix out = Matrix::Zero(a.rows(), c);
    for (Index j = 0; j < rows_; ++j) {
      out.col(static_cast<Eigen::Index>(cs->bucket[j])) += cs->sign[j] * a.col(static_cast<Eigen::Index>(j));
    }
    return out;
  }
  const auto& dct = std::get<Dct>(rep_);
  Matrix work = a * Eigen::Map<const Vector>(dct.sign.data(), static_cast<Eigen::Index>(rows_)).asDiagonal();
  if (work.rows() > 0) {
    const int n = static_cast<int>(rows_);
    const int howmany = static_cast<int>(work.rows());
    const fftw_r2r_kind kind = FFTW_REDFT10;
    fftw_plan plan;
    {
      std::lock_guard lock(fftw_planner_mutex());
      plan = fftw_plan_many_r2r(1, &n, howmany, work.data(), nullptr, howmany, 1, work.data(),
                                nullptr, howmany, 1, &kind, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw NumericError("FFTW could not plan the DCT");
    fftw_execute(plan);
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
  Matrix out(a.rows(), c);
  for (Index k = 0; k < cols_; ++k) {
    const Index freq = dct.sample[k];
    // REDFT10 returns twice the unnormalized DCT-II.
    out.col(static_cast<Eigen::Index>(k)) =
        (0.5 * dct.scale * dct_weight(freq, rows_)) * work.col(static_cast<Eigen::Index>(freq));
  }
  return out;
}

SketchOperator draw(const SketchSpec& spec) {
  Stream rng(spec.seed, spec.stream_id);
  return draw(spec, rng);
}

SketchOperator draw(const SketchSpec& spec, Stream& rng) {
  if (spec.rows == 0 || spec.cols == 0) {
    throw InvalidArgument(fmt::format("sketch shape {}x{} must be positive", spec.rows, spec.cols));
  }
  Dims factor_dims = spec.factor_dims.empty() ? Dims{spec.rows} : spec.factor_dims;
  switch (spec.kind) {
    case SketchKind::kGaussian:
      return {spec.kind, spec.rows, spec.cols, SketchOperator::Dense{draw_gaussian(spec.rows, spec.cols, rng)}};
    case SketchKind::kKhatriRao:
    case SketchKind::kKronecker: {
      if (product(factor_dims) != spec.rows) {
        throw InvalidArgument(fmt::format("factor extents {} do not multiply to {} rows",
                                          factor_dims, spec.rows));
      }
      std::vector<Matrix> factors;
      factors.reserve(factor_dims.size());
      if (spec.kind == SketchKind::kKhatriRao) {
        for (Index d : factor_dims) factors.push_back(draw_gaussian(d, spec.cols, rng));
      } else {
        const Index width = kronecker_factor_width(spec.cols, factor_dims.size());
        for (Index d : factor_dims) factors.push_back(draw_gaussian(d, width, rng));
        // Kronecker column c has digits (c_1, c_2, ...) base `width`, factor 0
        // fastest; expand each factor to the first `cols` Kronecker columns.
        for (Index m = 0, stride = 1; m < factors.size(); ++m, stride *= width) {
          Matrix expanded(factors[m].rows(), static_cast<Eigen::Index>(spec.cols));
          for (Index c = 0; c < spec.cols; ++c) {
            expanded.col(static_cast<Eigen::Index>(c)) =
                factors[m].col(static_cast<Eigen::Index>((c / stride) % width));
          }
          factors[m] = std::move(expanded);
        }
      }
      return {spec.kind, spec.rows, spec.cols, SketchOperator::KhatriRao{std::move(factors)}};
    }
    case SketchKind::kCountSketch: {
      SketchOperator::CountSketch cs;
      cs.bucket.resize(spec.rows);
      cs.sign.resize(spec.rows);
      for (Index j = 0; j < spec.rows; ++j) {
        cs.bucket[j] = static_cast<Index>(rng.below(spec.cols));
        cs.sign[j] = rng.sign();
      }
      return {spec.kind, spec.rows, spec.cols, std::move(cs)};
    }
    case SketchKind::kSubsampledDct: {
      if (spec.cols > spec.rows) {
        throw InvalidArgument(fmt::format(
            "sdct cannot sample {} of {} frequencies without replacement", spec.cols, spec.rows));
      }
      SketchOperator::Dct dct;
      dct.sign.resize(spec.rows);
      for (Index j = 0; j < spec.rows; ++j) dct.sign[j] = rng.sign();
      // Partial Fisher-Yates over the frequency indices.
      std::vector<Index> pool(spec.rows);
      for (Index j = 0; j < spec.rows; ++j) pool[j] = j;
      for (Index k = 0; k < spec.cols; ++k) {
        const Index pick = k + static_cast<Index>(rng.below(spec.rows - k));
        std::swap(pool[k], pool[pick]);
      }
      dct.sample.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.cols));
      dct.scale = std::sqrt(static_cast<double>(spec.rows) / static_cast<double>(spec.cols));
      return {spec.kind, spec.rows, spec.cols, std::move(dct)};
    }
  }
  throw InvalidArgument("unhandled sketch kind");
}

Matrix apply_kr_via_tenvecmult(const MatrixRef& a, const std::vector<Matrix>& factors) {
  if (factors.empty()) throw InvalidArgument("Khatri-Rao sketch needs at least one factor");
  const Eigen::Index cols = factors.front().cols();
  Index trailing = 1;
  for (const auto& f : factors) {
    if (f.cols() != cols) {
      throw InvalidArgument("Khatri-Rao factors must have equal column counts");
    }
    trailing *= static_cast<Index>(f.rows());
  }
  if (static_cast<Index>(a.cols()) != trailing) {
    throw InvalidArgument(fmt::format(
        "matrix has {} columns but the Khatri-Rao factors span {} rows", a.cols(), trailing));
  }
  const Index front = static_cast<Index>(a.rows());
  Matrix owned;
  const double* base = a.data();
  if (a.outerStride() != a.rows()) {
    owned = contiguous(a);
    base = owned.data();
  }
  // Contract the slowest mode for every column with one GEMM.
  const Matrix& last = factors.back();
  Index len = front * trailing / static_cast<Index>(last.rows());
  Matrix z = ConstMatrixMap(base, static_cast<Eigen::Index>(len), last.rows()) * last;
  for (Index m = factors.size() - 1; m-- > 0;) {
    const Matrix& f = factors[m];
    const Index next_len = len / static_cast<Index>(f.rows());
    Matrix next(static_cast<Eigen::Index>(next_len), cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      next.col(c).noalias() =
          ConstMatrixMap(z.col(c).data(), static_cast<Eigen::Index>(next_len), f.rows()) * f.col(c);
    }
    z = std::move(next);
    len = next_len;
  }
  return z;
}

Matrix apply_kr_via_tenvecmult(const DenseTensor& t, Index front_rows,
                               const std::vector<Matrix>& factors) {
  if (front_rows == 0 || t.size() % front_rows != 0) {
    throw InvalidArgument(fmt::format("front size {} does not divide tensor size {}", front_rows, t.size()));
  }
  return apply_kr_via_tenvecmult(t.as_matrix(front_rows, t.size() / front_rows), factors);
}

}  // namespace ttsketch
