#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "ttsketch/errors.hpp"
#include "ttsketch/sketch.hpp"

using namespace ttsketch;
using test::random_matrix;

namespace {

constexpr SketchKind kAllKinds[] = {SketchKind::kGaussian, SketchKind::kKhatriRao, SketchKind::kKronecker,
                                    SketchKind::kCountSketch, SketchKind::kSubsampledDct};

SketchSpec make_spec(SketchKind kind, Dims factors, Index cols, std::uint64_t seed) {
  SketchSpec s;
  s.kind = kind;
  s.rows = product(factors);
  s.cols = cols;
  s.factor_dims = std::move(factors);
  s.seed = seed;
  s.stream_id = 1;
  return s;
}

}  // namespace

TEST_CASE("sketch kind names round trip") {
  for (auto k : kAllKinds) CHECK(parse_sketch_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_sketch_kind("hadamard"), InvalidArgument);
}

TEST_CASE("fast paths agree with the materialized sketch") {
  const std::vector<std::pair<Dims, Index>> shapes{{{64}, 24}, {{4, 4, 4}, 10}, {{2, 3, 5}, 7},
                                                   {{8, 3}, 24}, {{7}, 1}, {{2, 2, 2, 2, 2, 2}, 5}};
  for (auto kind : kAllKinds) {
    for (const auto& [factors, cols] : shapes) {
      for (Index front : {1, 5, 13}) {
        const SketchOperator op = draw(make_spec(kind, factors, cols, front));
        const Matrix a = random_matrix(front, product(factors), 31 * front);
        CAPTURE(to_string(kind));
        CAPTURE(cols);
        CHECK(test::rel_diff(op.apply_right(a), a * op.materialize()) <= 1e-10);
      }
    }
  }
}

TEST_CASE("fast paths accept strided views") {
  const Matrix big = random_matrix(10, 24, 3);
  for (auto kind : kAllKinds) {
    const SketchOperator op = draw(make_spec(kind, {2, 3, 4}, 6, 2));
    const auto block = big.topRows(4);
    CHECK(test::rel_diff(op.apply_right(block), Matrix(block) * op.materialize()) <= 1e-10);
  }
}

TEST_CASE("draw is deterministic per seed and stream") {
  for (auto kind : kAllKinds) {
    const SketchSpec spec = make_spec(kind, {3, 4}, 5, 77);
    CHECK(draw(spec).materialize() == draw(spec).materialize());
    Stream rng(77, 1);
    CHECK(draw(spec, rng).materialize() == draw(spec).materialize());
    SketchSpec other = spec;
    other.stream_id = 2;
    CHECK(draw(other).materialize() != draw(spec).materialize());
  }
}

TEST_CASE("Khatri-Rao sketch columns are Kronecker products of factor columns") {
  const SketchOperator op = draw(make_spec(SketchKind::kKhatriRao, {2, 3}, 4, 5));
  const auto& factors = std::get<SketchOperator::KhatriRao>(op.representation()).factors;
  REQUIRE(factors.size() == 2);
  CHECK(factors[0].rows() == 2);
  CHECK(factors[1].rows() == 3);
  const Matrix full = op.materialize();
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(full.col(j) == kron(factors[1].col(j), factors[0].col(j)));
}

TEST_CASE("Kronecker sketch factor widths") {
  CHECK(kronecker_factor_width(20, 2) == 5);
  CHECK(kronecker_factor_width(12, 4) == 2);
  CHECK(kronecker_factor_width(16, 4) == 2);
  CHECK(kronecker_factor_width(17, 4) == 3);
  CHECK(kronecker_factor_width(1, 3) == 1);
  CHECK(kronecker_factor_width(17, 1) == 17);
  CHECK_THROWS_AS(kronecker_factor_width(3, 0), InvalidArgument);
}

TEST_CASE("Kronecker sketch keeps the leading columns of the full product") {
  // Factors of width L = 3 over modes (2, 2): the full Kronecker product has
  // 9 columns and the sketch keeps the first 7.
  const SketchOperator op = draw(make_spec(SketchKind::kKronecker, {2, 2}, 7, 8));
  const Matrix kept = op.materialize();
  Stream rng(8, 1);
  Matrix f0(2, 3);
  Matrix f1(2, 3);
  rng.fill_normal(std::span<double>(f0.data(), 6));
  rng.fill_normal(std::span<double>(f1.data(), 6));
  const Matrix full = kron(f1, f0);
  CHECK(kept == full.leftCols(7));
}

TEST_CASE("count sketch rows carry exactly one unit entry") {
  const SketchOperator op = draw(make_spec(SketchKind::kCountSketch, {30}, 6, 4));
  const Matrix m = op.materialize();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int nonzero = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        ++nonzero;
        CHECK(std::abs(m(i, j)) == 1.0);
      }
    }
    CHECK(nonzero == 1);
  }
  const SketchOperator small = draw(make_spec(SketchKind::kCountSketch, {6}, 3, 4));
  const Matrix a = random_matrix(7, 6, 5);
  CHECK(small.apply_right(a) == a * small.materialize());
}

TEST_CASE("subsampled DCT") {
  const Index rows = 16;
  const Index cols = 5;
  const SketchOperator op = draw(make_spec(SketchKind::kSubsampledDct, {rows}, cols, 6));
  const Matrix m = op.materialize();
  // Columns of D C S are orthonormal; the sketch scales them by sqrt(rows/cols).
  const Matrix g = m.transpose() * m;
  const double scale2 = static_cast<double>(rows) / static_cast<double>(cols);
  CHECK((g - scale2 * Matrix::Identity(cols, cols)).norm() <= 1e-12);

  const auto& dct = std::get<SketchOperator::Dct>(op.representation());
  std::vector<Index> sorted = dct.sample;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(sorted.back() < rows);

  CHECK_THROWS_AS(draw(make_spec(SketchKind::kSubsampledDct, {4}, 5, 1)), InvalidArgument);
}

TEST_CASE("Gaussian sketch entry statistics") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = draw(make_spec(SketchKind::kGaussian, {200}, 20, seed)).materialize();
    const double mean = m.mean();
    const double var = (m.array() - mean).square().sum() / static_cast<double>(m.size() - 1);
    CHECK(std::abs(mean) <= 0.05);
    CHECK(var >= 0.9);
    CHECK(var <= 1.1);
  }
}

TEST_CASE("Gaussian sketch preserves energy in expectation") {
  const Matrix a = random_matrix(10, 30, 9);
  const Index cols = 6;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    sum += draw(make_spec(SketchKind::kGaussian, {30}, cols, 1000 + seed)).apply_right(a).squaredNorm();
  }
  const double expected = static_cast<double>(cols) * a.squaredNorm();
  CHECK(sum / 200.0 == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("sketch shape validation") {
  CHECK_THROWS_AS(draw(make_spec(SketchKind::kGaussian, {5}, 0, 1)), InvalidArgument);
  SketchSpec bad = make_spec(SketchKind::kKhatriRao, {2, 3}, 4, 1);
  bad.rows = 7;
  CHECK_THROWS_AS(draw(bad), InvalidArgument);
  const SketchOperator op = draw(make_spec(SketchKind::kGaussian, {5}, 2, 1));
  CHECK_THROWS_AS(op.apply_right(random_matrix(3, 4, 1)), InvalidArgument);
}

TEST_CASE("TenVecMult contraction") {
  const DenseTensor t = test::random_tensor({2, 3, 2, 2}, 12);
  SUBCASE("unit vectors select a fiber") {
    std::vector<Matrix> factors{Matrix::Zero(3, 1), Matrix::Zero(2, 1), Matrix::Zero(2, 1)};
    for (auto& f : factors) f(0, 0) = 1.0;
    const Matrix r = apply_kr_via_tenvecmult(t, 2, factors);
    CHECK(r(0, 0) == t({0, 0, 0, 0}));
    CHECK(r(1, 0) == t({1, 0, 0, 0}));
  }
  SUBCASE("zero factor gives a zero column") {
    std::vector<Matrix> factors{random_matrix(3, 2, 1), random_matrix(2, 2, 2), random_matrix(2, 2, 3)};
    factors[1].col(1).setZero();
    const Matrix r = apply_kr_via_tenvecmult(t, 2, factors);
    CHECK(r.col(1).isZero(0.0));
  }
  SUBCASE("matches the dense Khatri-Rao product") {
    const std::vector<Matrix> factors{random_matrix(3, 4, 4), random_matrix(2, 4, 5), random_matrix(2, 4, 6)};
    const Matrix dense = khatri_rao(factors[2], khatri_rao(factors[1], factors[0]));
    const Matrix expected = t.as_matrix(2, 12) * dense;
    CHECK(test::rel_diff(apply_kr_via_tenvecmult(t, 2, factors), expected) <= 1e-10);
  }
  CHECK_THROWS_AS(apply_kr_via_tenvecmult(t, 5, {random_matrix(3, 1, 1)}), InvalidArgument);
  CHECK_THROWS_AS(apply_kr_via_tenvecmult(t, 2, {random_matrix(3, 1, 1), random_matrix(5, 1, 1)}),
                  InvalidArgument);
}
