#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>

#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/rng.hpp"

namespace ttsketch::test {

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Stream s(seed, 0x7e57);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  s.fill_normal(std::span<double>(m.data(), static_cast<std::size_t>(m.size())));
  return m;
}

inline DenseTensor random_tensor(Dims dims, std::uint64_t seed) {
  Stream s(seed, 0x7e58);
  DenseTensor t(std::move(dims));
  s.fill_normal(t.data());
  return t;
}

inline double rel_diff(const MatrixRef& a, const MatrixRef& b) {
  return (a - b).norm() / std::max(b.norm(), std::numeric_limits<double>::min());
}

/// Visits every multi-index of `dims` in first-index-fastest order.
inline void for_each_index(const Dims& dims, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> idx(dims.size(), 0);
  const Index total = product(dims);
  for (Index k = 0; k < total; ++k) {
    fn(idx);
    for (Index m = 0; m < dims.size(); ++m) {
      if (++idx[m] < dims[m]) break;
      idx[m] = 0;
    }
  }
}

}  // namespace ttsketch::test
