#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ttsketch {

using Index = std::size_t;
using Dims = std::vector<Index>;

/// Column-major (first-index-fastest) dense matrix; an order-2 tensor.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Product of extents; 1 for an empty list.
Index product(std::span<const Index> dims);

/**
 * Dense N-way array of doubles.
 *
 * Storage is first-index-fastest: the offset of the 0-based multi-index
 * (i_1, ..., i_N) is i_1 + i_2*I_1 + ... + i_N*I_1*...*I_{N-1}. Under this
 * layout every sequential unfolding, and every reshape, is a relabeling of
 * the same buffer.
 */
class DenseTensor {
 public:
  DenseTensor() = default;
  /// Zero-filled tensor.
  explicit DenseTensor(Dims dims);
  DenseTensor(Dims dims, std::vector<double> data);

  /// Copy of a matrix as an order-2 tensor.
  static DenseTensor from_matrix(const MatrixRef& m);

  const Dims& dims() const noexcept { return dims_; }
  Index order() const noexcept { return dims_.size(); }
  Index size() const noexcept { return data_.size(); }
  Index dim(Index mode) const { return dims_.at(mode); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::vector<double> release() && { return std::move(data_); }

  Index offset(std::span<const Index> index) const;
  double operator()(std::span<const Index> index) const { return data_[offset(index)]; }
  double& operator()(std::span<const Index> index) { return data_[offset(index)]; }
  double operator()(std::initializer_list<Index> index) const {
    return (*this)(std::span<const Index>(index.begin(), index.size()));
  }
  double& operator()(std::initializer_list<Index> index) {
    return (*this)(std::span<const Index>(index.begin(), index.size()));
  }

  /// Whole buffer viewed as a rows x cols matrix; rows*cols must equal size().
  ConstMatrixMap as_matrix(Index rows, Index cols) const;
  MatrixMap as_matrix(Index rows, Index cols);

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Same data, new extents. Throws InvalidArgument on size mismatch.
DenseTensor reshape(const DenseTensor& t, Dims new_dims);
DenseTensor reshape(DenseTensor&& t, Dims new_dims);

/// Sequential unfolding A_([split]): modes 1..split as rows, the rest as
/// columns. Zero-copy view; 1 <= split <= N-1.
ConstMatrixMap unfold_seq(const DenseTensor& t, Index split);

/// Mode-n unfolding A_(n) (0-based mode): I_n rows, remaining modes as
/// columns with the first remaining index fastest.
Matrix unfold_mode(const DenseTensor& t, Index mode);

/// Inverse of unfold_mode for a tensor with extents `dims`.
DenseTensor fold_mode(const MatrixRef& m, Index mode, Dims dims);

/// t x_n B: replaces extent I_n by B.rows(). Requires B.cols() == I_n.
DenseTensor mode_n_product(const DenseTensor& t, const MatrixRef& b, Index mode);

/// Contraction of a's mode n with b's mode m. Result extents are a's
/// extents without n followed by b's extents without m.
DenseTensor mode_nm_product(const DenseTensor& a, const DenseTensor& b, Index mode_a,
                            Index mode_b);

double frobenius_norm(const DenseTensor& t);
double frobenius_norm2(std::span<const double> data);
double inner(const DenseTensor& a, const DenseTensor& b);

Matrix kron(const MatrixRef& a, const MatrixRef& b);
/// Columnwise Kronecker: column j is kron(a(:,j), b(:,j)).
Matrix khatri_rao(const MatrixRef& a, const MatrixRef& b);

}  // namespace ttsketch
