#include "ttsketch/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

double relative_error(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims()) {
    throw InvalidArgument(fmt::format("relative_error: dims {} vs {}", a.dims(), b.dims()));
  }
  const double ref = frobenius_norm(a);
  if (ref == 0.0) throw InvalidArgument("relative_error: reference tensor has zero norm");
  double diff2 = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    diff2 += d * d;
  }
  return std::sqrt(diff2) / ref;
}

double tt_svd_bound_oracle(const DenseTensor& t, std::span<const Index> ranks) {
  if (t.size() > kOracleEntryLimit) {
    throw ResourceLimit(fmt::format("bound oracle limited to {} entries, tensor has {}",
                                    kOracleEntryLimit, t.size()));
  }
  if (t.order() < 2 || ranks.size() + 1 != t.order()) {
    throw InvalidArgument(fmt::format("bound oracle needs {} ranks, got {}", t.order() - 1, ranks.size()));
  }
  double sum = 0.0;
  for (Index n = 1; n < t.order(); ++n) {
    // Direct bidiagonal SVD on the unfolding, deliberately not the Gram path.
    const Matrix a = unfold_seq(t, n);
    const Eigen::BDCSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    for (Eigen::Index i = static_cast<Eigen::Index>(ranks[n - 1]); i < s.size(); ++i) sum += s(i) * s(i);
  }
  return std::sqrt(sum);
}

}  // namespace ttsketch
