#include <doctest.h>

#include <cmath>
#include <vector>

#include "ttsketch/rng.hpp"

using namespace ttsketch;

TEST_CASE("streams are pure functions of seed, id and position") {
  Stream a(42, 3);
  Stream b(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Stream c(42, 4);
  Stream d(43, 3);
  Stream e(42, 3);
  CHECK(c.next_u64() != e.next_u64());
  Stream f(42, 3);
  CHECK(d.next_u64() != f.next_u64());

  Stream g(1, 1);
  Stream h(1, 1);
  g.discard(10);
  for (int i = 0; i < 10; ++i) h.next_u64();
  CHECK(g.next_u64() == h.next_u64());
  CHECK(g.counter() == 11);
}

TEST_CASE("uniforms stay inside the open unit interval") {
  Stream s(7, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("inverse normal CDF") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
  CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
  CHECK(inverse_normal_cdf(0.8) == doctest::Approx(0.8416212335729143).epsilon(1e-14));
  // Round trip through the complementary error function.
  for (double p : {1e-300, 1e-20, 0.01, 0.3, 0.5, 0.7, 0.99, 1 - 1e-12}) {
    const double x = inverse_normal_cdf(p);
    CHECK(0.5 * std::erfc(-x / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("batched normals reproduce the scalar sequence") {
  for (std::size_t n : {0u, 1u, 255u, 256u, 257u, 1000u}) {
    Stream a(9, 2);
    Stream b(9, 2);
    std::vector<double> batch(n);
    a.fill_normal(batch);
    for (double x : batch) REQUIRE(x == b.normal());
    CHECK(a.counter() == b.counter());
  }
}

TEST_CASE("normal sample moments") {
  Stream s(11, 0);
  std::vector<double> v(200000);
  s.fill_normal(v);
  double mean = 0.0;
  double var = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size() - 1);
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bounded integers and signs") {
  Stream s(5, 5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = s.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(s.below(1) == 0);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) plus += s.sign() > 0 ? 1 : 0;
  CHECK(std::abs(plus - 5000) < 300);
}
