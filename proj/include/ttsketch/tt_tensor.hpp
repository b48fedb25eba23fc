#pragma once

#include <span>
#include <vector>

#include "ttsketch/dense_tensor.hpp"

namespace ttsketch {

/**
 * Tensor train: N order-3 cores, core n with extents (r_{n-1}, I_n, r_n)
 * and boundary ranks r_0 = r_N = 1. The first and last cores keep their
 * unit boundary extent instead of being squeezed to matrices.
 */
class TTTensor {
 public:
  /// Validates the chain; throws InvalidStructure on mismatched ranks.
  explicit TTTensor(std::vector<DenseTensor> cores);

  const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
  const DenseTensor& core(Index n) const { return cores_.at(n); }
  Index order() const noexcept { return cores_.size(); }

  /// (I_1, ..., I_N)
  Dims dims() const;
  /// Interior ranks (r_1, ..., r_{N-1}).
  std::vector<Index> ranks() const;

  /// Number of stored doubles across all cores.
  Index parameter_count() const;

  friend bool operator==(const TTTensor&, const TTTensor&) = default;

 private:
  std::vector<DenseTensor> cores_;
};

/// Dense tensor represented by the train, evaluated left to right.
DenseTensor tt_contract(const TTTensor& tt);

/// Single entry (0-based multi-index) as a product of core slices.
double tt_entry(const TTTensor& tt, std::span<const Index> index);

/// ||G_n^T G_n - I||_F with G_n the (r_{n-1} I_n) x r_n matricization of
/// core n (0-based). Zero means the core is exactly left-orthonormal.
double left_ortho_defect(const TTTensor& tt, Index core);

}  // namespace ttsketch
