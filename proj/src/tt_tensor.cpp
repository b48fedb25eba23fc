#include "ttsketch/tt_tensor.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

TTTensor::TTTensor(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) {
    throw InvalidStructure("tensor train needs at least one core");
  }
  Index left = 1;
  for (Index n = 0; n < cores_.size(); ++n) {
    const Dims& d = cores_[n].dims();
    if (d.size() != 3) {
      throw InvalidStructure(fmt::format("core {} has order {}, expected 3", n + 1, d.size()));
    }
    if (d[0] != left) {
      throw InvalidStructure(fmt::format("core {} has leading rank {}, expected {}", n + 1, d[0], left));
    }
    left = d[2];
  }
  if (left != 1) {
    throw InvalidStructure(fmt::format("last core has trailing rank {}, expected 1", left));
  }
}

Dims TTTensor::dims() const {
  Dims out;
  out.reserve(cores_.size());
  for (const auto& c : cores_) out.push_back(c.dims()[1]);
  return out;
}

std::vector<Index> TTTensor::ranks() const {
  std::vector<Index> out;
  for (Index n = 0; n + 1 < cores_.size(); ++n) out.push_back(cores_[n].dims()[2]);
  return out;
}

Index TTTensor::parameter_count() const {
  Index total = 0;
  for (const auto& c : cores_) total += c.size();
  return total;
}

DenseTensor tt_contract(const TTTensor& tt) {
  // Carry is (I_1...I_n) x r_n; multiply by core n+1 viewed as r_n x (I_{n+1} r_{n+1}).
  // The product, (I_1...I_n) x (I_{n+1} r_{n+1}), is bit-for-bit the next
  // carry (I_1...I_{n+1}) x r_{n+1} under column-major storage.
  const auto& first = tt.core(0);
  std::vector<double> carry(first.data().begin(), first.data().end());
  Index rows = first.dims()[1];
  std::vector<double> next;
  for (Index n = 1; n < tt.order(); ++n) {
    const auto& core = tt.core(n);
    const Index r_in = core.dims()[0];
    const Index width = core.dims()[1];
    const Index r_out = core.dims()[2];
    next.resize(rows * width * r_out);
    MatrixMap(next.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width * r_out))
        .noalias() = ConstMatrixMap(carry.data(), static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(r_in)) *
                     core.as_matrix(r_in, width * r_out);
    std::swap(carry, next);
    rows *= width;
  }
  return DenseTensor(tt.dims(), std::move(carry));
}

double tt_entry(const TTTensor& tt, std::span<const Index> index) {
  if (index.size() != tt.order()) {
    throw InvalidArgument(
        fmt::format("index has {} entries, train order is {}", index.size(), tt.order()));
  }
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Ones(1);
  for (Index n = 0; n < tt.order(); ++n) {
    const auto& core = tt.core(n);
    const Dims& d = core.dims();
    if (index[n] >= d[1]) {
      throw InvalidArgument(fmt::format("index {} out of range for mode {} of extent {}", index[n],
                                        n + 1, d[1]));
    }
    // Slice core(:, i_n, :) is r_{n-1} x r_n with row stride 1, column stride r_{n-1} I_n.
    const Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(
        core.data().data() + index[n] * d[0], static_cast<Eigen::Index>(d[0]),
        static_cast<Eigen::Index>(d[2]), Eigen::OuterStride<>(static_cast<Eigen::Index>(d[0] * d[1])));
    row = row * slice;
  }
  return row(0);
}

double left_ortho_defect(const TTTensor& tt, Index core) {
  if (core + 1 >= tt.order()) {
    throw InvalidArgument(
        fmt::format("left-orthonormality is defined for cores 1..{}, got {}", tt.order() - 1, core + 1));
  }
  const auto& c = tt.core(core);
  const Index r = c.dims()[2];
  const auto g = c.as_matrix(c.dims()[0] * c.dims()[1], r);
  return (g.transpose() * g - Matrix::Identity(r, r)).norm();
}

}  // namespace ttsketch
