#include "ttsketch/dense_tensor.hpp"

#include <numeric>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

namespace {

void check_dims(const Dims& dims) {
  for (Index d : dims) {
    if (d == 0) {
      throw InvalidArgument(fmt::format("tensor extents must be positive, got {}", dims));
    }
  }
}

// Product of the extents strictly before and strictly after `mode`.
std::pair<Index, Index> outer_sizes(const Dims& dims, Index mode) {
  const std::span<const Index> all(dims);
  return {product(all.first(mode)), product(all.subspan(mode + 1))};
}

}  // namespace

Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != product(dims_)) {
    throw InvalidArgument(fmt::format("data length {} does not match extents {}",
                                      data_.size(), dims_));
  }
}

DenseTensor DenseTensor::from_matrix(const MatrixRef& m) {
  DenseTensor t({static_cast<Index>(m.rows()), static_cast<Index>(m.cols())});
  t.as_matrix(t.dims_[0], t.dims_[1]) = m;
  return t;
}

Index DenseTensor::offset(std::span<const Index> index) const {
  if (index.size() != dims_.size()) {
    throw InvalidArgument(
        fmt::format("index has {} entries, tensor order is {}", index.size(), dims_.size()));
  }
  Index off = 0;
  Index stride = 1;
  for (Index k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) {
      throw InvalidArgument(fmt::format("index {} out of range for extents {}",
                                        std::vector<Index>(index.begin(), index.end()), dims_));
    }
    off += index[k] * stride;
    stride *= dims_[k];
  }
  return off;
}

ConstMatrixMap DenseTensor::as_matrix(Index rows, Index cols) const {
  if (rows * cols != data_.size()) {
    throw InvalidArgument(fmt::format("cannot view {} entries as {}x{}", data_.size(), rows, cols));
  }
  return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

MatrixMap DenseTensor::as_matrix(Index rows, Index cols) {
  if (rows * cols != data_.size()) {
    throw InvalidArgument(fmt::format("cannot view {} entries as {}x{}", data_.size(), rows, cols));
  }
  return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

DenseTensor reshape(const DenseTensor& t, Dims new_dims) {
  return reshape(DenseTensor(t), std::move(new_dims));
}

DenseTensor reshape(DenseTensor&& t, Dims new_dims) {
  if (product(new_dims) != t.size()) {
    throw InvalidArgument(
        fmt::format("cannot reshape extents {} into {}", t.dims(), new_dims));
  }
  return DenseTensor(std::move(new_dims), std::move(t).release());
}

ConstMatrixMap unfold_seq(const DenseTensor& t, Index split) {
  if (split < 1 || split >= t.order()) {
    throw InvalidArgument(fmt::format("sequential unfolding split {} outside 1..{}", split,
                                      t.order() == 0 ? 0 : t.order() - 1));
  }
  const Index rows = product(std::span<const Index>(t.dims()).first(split));
  return t.as_matrix(rows, t.size() / rows);
}

Matrix unfold_mode(const DenseTensor& t, Index mode) {
  if (mode >= t.order()) {
    throw InvalidArgument(fmt::format("mode {} out of range for order {}", mode, t.order()));
  }
  const auto [left, right] = outer_sizes(t.dims(), mode);
  const Index n = t.dims()[mode];
  Matrix out(n, left * right);
  const double* src = t.data().data();
  // Column index of (left l, right r) is l + left*r.
  for (Index r = 0; r < right; ++r) {
    ConstMatrixMap slab(src + r * left * n, left, n);
    out.middleCols(r * left, left) = slab.transpose();
  }
  return out;
}

DenseTensor fold_mode(const MatrixRef& m, Index mode, Dims dims) {
  if (mode >= dims.size()) {
    throw InvalidArgument(fmt::format("mode {} out of range for order {}", mode, dims.size()));
  }
  DenseTensor t(std::move(dims));
  const auto [left, right] = outer_sizes(t.dims(), mode);
  const Index n = t.dims()[mode];
  if (static_cast<Index>(m.rows()) != n || static_cast<Index>(m.cols()) != left * right) {
    throw InvalidArgument(fmt::format("cannot fold {}x{} matrix into extents {} along mode {}",
                                      m.rows(), m.cols(), t.dims(), mode));
  }
  double* dst = t.data().data();
  for (Index r = 0; r < right; ++r) {
    MatrixMap slab(dst + r * left * n, left, n);
    slab = m.middleCols(r * left, left).transpose();
  }
  return t;
}

DenseTensor mode_n_product(const DenseTensor& t, const MatrixRef& b, Index mode) {
  if (mode >= t.order()) {
    throw InvalidArgument(fmt::format("mode {} out of range for order {}", mode, t.order()));
  }
  const Index n = t.dims()[mode];
  if (static_cast<Index>(b.cols()) != n) {
    throw InvalidArgument(fmt::format("mode-{} product needs {} columns, matrix has {}", mode, n,
                                      b.cols()));
  }
  const auto [left, right] = outer_sizes(t.dims(), mode);
  Dims out_dims = t.dims();
  out_dims[mode] = static_cast<Index>(b.rows());
  DenseTensor out(out_dims);
  const Index j = out_dims[mode];
  for (Index r = 0; r < right; ++r) {
    ConstMatrixMap slab(t.data().data() + r * left * n, left, n);
    MatrixMap dst(out.data().data() + r * left * j, left, j);
    dst.noalias() = slab * b.transpose();
  }
  return out;
}

DenseTensor mode_nm_product(const DenseTensor& a, const DenseTensor& b, Index mode_a,
                            Index mode_b) {
  if (mode_a >= a.order() || mode_b >= b.order()) {
    throw InvalidArgument(fmt::format("contraction modes ({}, {}) out of range for orders ({}, {})",
                                      mode_a, mode_b, a.order(), b.order()));
  }
  if (a.dims()[mode_a] != b.dims()[mode_b]) {
    throw InvalidArgument(fmt::format("contracted extents differ: {} vs {}", a.dims()[mode_a],
                                      b.dims()[mode_b]));
  }
  Dims out_dims;
  for (Index k = 0; k < a.order(); ++k) {
    if (k != mode_a) out_dims.push_back(a.dims()[k]);
  }
  for (Index k = 0; k < b.order(); ++k) {
    if (k != mode_b) out_dims.push_back(b.dims()[k]);
  }
  if (out_dims.empty()) out_dims.push_back(1);
  // A_(n)^T B_(m) is (rest of a) x (rest of b), already first-index-fastest.
  const Matrix c = unfold_mode(a, mode_a).transpose() * unfold_mode(b, mode_b);
  return DenseTensor(std::move(out_dims), std::vector<double>(c.data(), c.data() + c.size()));
}

double frobenius_norm2(std::span<const double> data) {
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()))
      .squaredNorm();
}

double frobenius_norm(const DenseTensor& t) {
  return Eigen::Map<const Vector>(t.data().data(), static_cast<Eigen::Index>(t.size())).norm();
}

double inner(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) {
    throw InvalidArgument(fmt::format("inner product of extents {} and {}", a.dims(), b.dims()));
  }
  const auto n = static_cast<Eigen::Index>(a.size());
  return Eigen::Map<const Vector>(a.data().data(), n).dot(Eigen::Map<const Vector>(b.data().data(), n));
}

Matrix kron(const MatrixRef& a, const MatrixRef& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix khatri_rao(const MatrixRef& a, const MatrixRef& b) {
  if (a.cols() != b.cols()) {
    throw InvalidArgument(
        fmt::format("Khatri-Rao product needs equal column counts, got {} and {}", a.cols(), b.cols()));
  }
  Matrix out(a.rows() * b.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.col(j).segment(i * b.rows(), b.rows()) = a(i, j) * b.col(j);
    }
  }
  return out;
}

}  // namespace ttsketch
