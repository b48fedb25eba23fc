// Acceptance checks. Prints one PASS/FAIL line per criterion and exits with
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ttsketch/decompose.hpp"
#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/generators.hpp"
#include "ttsketch/io.hpp"
#include "ttsketch/metrics.hpp"
#include "ttsketch/rng.hpp"
#include "ttsketch/sketch.hpp"
#include "ttsketch/tt_tensor.hpp"

namespace {

using namespace ttsketch;
using Ranks = std::vector<Index>;

struct Outcome {
  bool pass = true;
  std::string detail;
};

constexpr SketchKind kAllSketches[] = {SketchKind::kGaussian, SketchKind::kKhatriRao,
                                       SketchKind::kKronecker, SketchKind::kCountSketch,
                                       SketchKind::kSubsampledDct};

double residual(const DenseTensor& t, const Decomposition& d) {
  return relative_error(t, tt_contract(d.tt)) * frobenius_norm(t);
}

bool dominates(const Ranks& a, const Ranks& b) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
  }
  return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Rank table on the smooth-function tensors at extent 40.
Outcome rank_table() {
  Outcome out;
  const std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5};
  const std::vector<Ranks> want_svd{{2, 2, 2, 2}, {2, 3, 3, 2}, {3, 3, 3, 3}, {4, 4, 4, 4}};
  const std::vector<Ranks> want_greedy{{3, 3, 3, 3}, {4, 4, 4, 3}, {4, 5, 4, 4}, {5, 5, 5, 5}};
  std::vector<std::string> notes;
  {
    const DenseTensor d = gen_func_hilbert(40);
    const double norm2 = frobenius_norm2(d.data());
    const auto spectra = unfolding_spectra(d);
    for (Index k = 0; k < eps.size(); ++k) {
      const Ranks svd = tt_svd(d, eps[k]).ranks();
      const Ranks greedy = greedy_ranks_from_spectra(spectra, norm2, eps[k]);
      Index off = 0;
      bool within = true;
      for (Index i = 0; i < greedy.size(); ++i) {
        const auto diff = static_cast<long>(greedy[i]) - static_cast<long>(want_greedy[k][i]);
        if (diff != 0) ++off;
        if (diff > 1 || diff < -1) within = false;
      }
      const bool svd_ok = svd == want_svd[k];
      const bool greedy_ok = within && off <= 1;
      out.pass = out.pass && svd_ok && greedy_ok;
      notes.push_back(fmt::format("D eps={:g} tt_svd={}{} greedy={}{}", eps[k], svd,
                                  svd_ok ? "" : fmt::format(" (want {})", want_svd[k]), greedy,
                                  greedy_ok ? "" : fmt::format(" (want {})", want_greedy[k])));
    }
  }
  {
    const DenseTensor c = gen_func_sin(40);
    const Ranks svd = tt_svd(c, 1e-2).ranks();
    const bool ok = svd == Ranks{2, 2, 2, 2};
    out.pass = out.pass && ok;
    notes.push_back(fmt::format("C eps=0.01 tt_svd={}{}", svd, ok ? "" : " (want [2, 2, 2, 2])"));
  }
  out.detail = fmt::format("{}", fmt::join(notes, "; "));
  return out;
}

// Deterministic bound: actual <= oracle <= eps * norm.
Outcome svd_bound() {
  Outcome out;
  Stream dims_rng(2024, 1);
  int checks = 0;
  int below_oracle = 0;
  int oracle_within = 0;
  int actual_within = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 25; ++s) {
    Dims dims(4);
    for (auto& d : dims) d = 2 + dims_rng.below(9);
    // Alternate unstructured noise with near-low-rank tensors.
    DenseTensor t;
    if (s % 2 == 0) {
      Stream rng(s, 0xacce5501);
      t = random_dense(dims, rng);
    } else {
      Ranks core(3);
      for (Index i = 0; i < 3; ++i) core[i] = 1 + dims_rng.below(3);
      t = gen_tt_noise(dims, core, 1e-3, s);
    }
    const double norm = frobenius_norm(t);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const Decomposition d = tt_svd(t, eps);
      const double actual = residual(t, d);
      const double oracle = tt_svd_bound_oracle(t, d.ranks());
      const double slack = 1e-10 * norm;
      ++checks;
      if (actual <= oracle + slack) ++below_oracle;
      if (oracle <= eps * norm + slack) ++oracle_within;
      if (actual <= eps * norm + slack) ++actual_within;
      worst = std::max(worst, oracle / (eps * norm));
    }
  }
  out.pass = below_oracle == checks && oracle_within == checks;
  out.detail = fmt::format(
      "actual <= oracle {}/{}; oracle <= eps*norm {}/{} (max ratio {:.4f}); actual <= eps*norm {}/{}",
      below_oracle, checks, oracle_within, checks, worst, actual_within, checks);
  return out;
}

// Exact-rank recovery for every algorithm and sketch.
Outcome exact_recovery() {
  const Dims dims{6, 7, 8, 9};
  const Ranks ranks{2, 3, 2};
  struct Config {
    std::string name;
    std::function<Decomposition(const DenseTensor&, std::uint64_t)> run;
  };
  std::vector<Config> configs;
  configs.push_back({"tt_svd", [](const DenseTensor& t, std::uint64_t) { return tt_svd(t, 1e-8); }});
  for (SketchKind k : kAllSketches) {
    for (unsigned q : {0u, 1u}) {
      configs.push_back({fmt::format("rand {} q={}", to_string(k), q),
                         [&ranks, k, q](const DenseTensor& t, std::uint64_t seed) {
                           FixedRankParams p;
                           p.ranks = ranks;
                           p.oversample = 10;
                           p.power = q;
                           p.sketch = k;
                           p.seed = seed;
                           return rand_tt_fixed_rank(t, p);
                         }});
    }
  }
  for (unsigned q : {1u, 2u}) {
    configs.push_back({fmt::format("rand-gram q={}", q), [&ranks, q](const DenseTensor& t, std::uint64_t seed) {
                         FixedRankParams p;
                         p.ranks = ranks;
                         p.oversample = 10;
                         p.power = q;
                         p.seed = seed;
                         return rand_tt_fixed_rank_gram(t, p);
                       }});
  }
  for (Index b : {Index{1}, Index{10}}) {
    configs.push_back({fmt::format("adaptive b={}", b), [b](const DenseTensor& t, std::uint64_t seed) {
                         FixedPrecisionParams p;
                         p.eps = 1e-6;
                         p.block = b;
                         p.seed = seed;
                         return adaptive_rand_tt(t, p);
                       }});
  }

  Outcome out;
  std::vector<std::string> bad;
  double worst = 0.0;
  for (const auto& c : configs) {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Stream rng(seed, 0xacce5503);
      const DenseTensor t = tt_contract(random_tt(dims, ranks, rng));
      const Decomposition d = c.run(t, seed);
      const double re = relative_error(t, tt_contract(d.tt));
      worst = std::max(worst, re);
      if (re <= 1e-6 && d.ranks() == ranks) ++ok;
    }
    if (ok != 20) bad.push_back(fmt::format("{} {}/20", c.name, ok));
  }
  out.pass = bad.empty();
  out.detail = bad.empty()
                   ? fmt::format("{} configurations x 20 seeds recovered; max RE {:.2e}", configs.size(), worst)
                   : fmt::format("failing: {}", fmt::join(bad, ", "));
  return out;
}

// Power iteration lowers the mean error.
Outcome power_benefit() {
  const Dims dims(5, 20);
  const Ranks core(4, 5);
  const DenseTensor t = gen_tt_noise(dims, core, 1e-4, 7);
  Outcome out;
  std::vector<std::string> notes;
  for (SketchKind k : {SketchKind::kGaussian, SketchKind::kKhatriRao}) {
    double mean[2] = {0.0, 0.0};
    for (unsigned q : {0u, 1u}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        FixedRankParams p;
        p.ranks = {3, 3, 3, 3};
        p.power = q;
        p.sketch = k;
        p.seed = seed;
        mean[q] += relative_error(t, tt_contract(rand_tt_fixed_rank(t, p).tt)) / 20.0;
      }
    }
    out.pass = out.pass && mean[1] <= mean[0];
    notes.push_back(fmt::format("{} mean RE q=0 {:.6e} q=1 {:.6e}", to_string(k), mean[0], mean[1]));
  }
  out.detail = fmt::format("{}", fmt::join(notes, "; "));
  return out;
}

// Telescoping residuals and the Gram estimator.
Outcome telescoping() {
  Outcome out;
  const TraceOptions trace{true};
  int runs = 0;
  int estimator_checks = 0;
  int failures = 0;
  double worst_est = 0.0;
  struct Case {
    Dims dims;
    Ranks core;
    double gamma;
  };
  const std::vector<Case> cases{{{10, 10, 10, 10, 10}, {3, 4, 4, 3}, 1e-2},
                                {{12, 9, 11, 8}, {4, 5, 3}, 1e-1},
                                {{20, 20, 20}, {6, 6}, 1e-3},
                                {{6, 7, 8, 9}, {2, 3, 2}, 0.5}};
  for (Index ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    const DenseTensor t = gen_tt_noise(c.dims, c.core, c.gamma, 100 + ci);
    const double norm2 = frobenius_norm2(t.data());
    FixedRankParams fr;
    fr.ranks = Ranks(c.dims.size() - 1, 3);
    fr.power = 1;
    fr.seed = ci;
    FixedPrecisionParams fp;
    fp.eps = 5e-2;
    fp.block = 2;
    fp.seed = ci;
    const std::vector<std::function<Decomposition()>> algos{
        [&] { return tt_svd(t, 5e-2, trace); },
        [&] { return tt_svd_fixed_rank(t, fr.ranks, trace); },
        [&] { return rand_tt_fixed_rank(t, fr, trace); },
        [&] { return rand_tt_fixed_rank_gram(t, fr, trace); },
        [&] { return adaptive_rand_tt(t, fp, trace); },
    };
    for (const auto& run : algos) {
      const Decomposition d = run();
      ++runs;
      double sum = 0.0;
      for (const auto& s : d.stages) sum += s.residual;
      const double total = residual(t, d);
      if (total > sum * (1.0 + 1e-12) + 1e-12 * std::sqrt(norm2)) ++failures;
      const auto norms = d.stage_norms();
      const double rel = total / std::sqrt(norm2);
      const GramEstimate e = error_estimate_gram(norms, rel, 1e-6);
      if (e.fp_floor_ok) {
        ++estimator_checks;
        const double err = std::fabs(e.value - total * total) / (total * total);
        worst_est = std::max(worst_est, err);
        if (err > 1e-6) ++failures;
      }
    }
  }
  out.pass = failures == 0 && estimator_checks > 0;
  out.detail = fmt::format("{} runs, {} estimator checks, {} failures; max estimator rel diff {:.2e}", runs,
                           estimator_checks, failures, worst_est);
  return out;
}

// Rank dominance of adaptive and greedy over TT-SVD.
Outcome rank_dominance() {
  Outcome out;
  std::vector<DenseTensor> tensors;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Index r = 2 + i % 4;
    tensors.push_back(gen_tt_noise({8, 8, 8, 8, 8}, Ranks(4, r), 1e-2 * static_cast<double>(1 + i % 3), 300 + i));
  }
  std::vector<std::string> notes;
  bool greedy_ok = true;
  for (double eps : {0.1, 0.05, 0.01}) {
    int dominated = 0;
    int runs = 0;
    for (Index i = 0; i < tensors.size(); ++i) {
      const DenseTensor& t = tensors[i];
      const Ranks svd = tt_svd(t, eps).ranks();
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        FixedPrecisionParams p;
        p.eps = eps;
        p.seed = 1000 * i + seed;
        ++runs;
        if (dominates(adaptive_rand_tt(t, p).ranks(), svd)) ++dominated;
      }
      if (!dominates(greedy_tt_rank(t, eps), svd)) greedy_ok = false;
    }
    const bool ok = 100 * dominated >= 95 * runs;
    out.pass = out.pass && ok;
    notes.push_back(fmt::format("eps={:g} adaptive {}/{}", eps, dominated, runs));
  }
  out.pass = out.pass && greedy_ok;
  notes.push_back(greedy_ok ? "greedy dominates always" : "greedy below tt_svd somewhere");
  out.detail = fmt::format("{}", fmt::join(notes, "; "));
  return out;
}

// Sketch fast paths against their explicit matrices.
Outcome sketch_oracles() {
  Outcome out;
  struct Shape {
    Index rows;
    Index cols;
    Dims factors;
  };
  const std::vector<Shape> shapes{{64, 24, {4, 4, 4}}, {64, 24, {8, 8}}, {60, 12, {3, 4, 5}},
                                  {24, 24, {2, 3, 4}}, {30, 7, {5, 6}},  {1, 1, {1}},
                                  {16, 20, {4, 4}}};
  int checks = 0;
  double worst = 0.0;
  Stream data(77, 0xacce5507);
  for (const auto& sh : shapes) {
    for (Index front : {Index{1}, Index{17}}) {
      Matrix a(static_cast<Eigen::Index>(front), static_cast<Eigen::Index>(sh.rows));
      data.fill_normal(std::span<double>(a.data(), static_cast<std::size_t>(a.size())));
      for (SketchKind k : kAllSketches) {
        // Sampling without replacement needs at least as many rows as columns.
        if (k == SketchKind::kSubsampledDct && sh.cols > sh.rows) continue;
        SketchSpec spec;
        spec.kind = k;
        spec.rows = sh.rows;
        spec.cols = sh.cols;
        spec.factor_dims = sh.factors;
        spec.seed = 9 + checks;
        spec.stream_id = 3;
        const SketchOperator op = draw(spec);
        const Matrix dense = a * op.materialize();
        const double ref = std::max(dense.norm(), 1e-300);
        worst = std::max(worst, (op.apply_right(a) - dense).norm() / ref);
        ++checks;
        if (k == SketchKind::kKhatriRao) {
          const auto& kr = std::get<SketchOperator::KhatriRao>(op.representation());
          worst = std::max(worst, (apply_kr_via_tenvecmult(a, kr.factors) - dense).norm() / ref);
          Dims tdims{front};
          tdims.insert(tdims.end(), sh.factors.begin(), sh.factors.end());
          const DenseTensor t(tdims, std::vector<double>(a.data(), a.data() + a.size()));
          worst = std::max(worst, (apply_kr_via_tenvecmult(t, front, kr.factors) - dense).norm() / ref);
          ++checks;
        }
      }
    }
  }
  out.pass = worst <= 1e-10;
  out.detail = fmt::format("{} comparisons, max relative difference {:.2e}", checks, worst);
  return out;
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Repeatable output and the speed smoke check.
Outcome determinism_and_speed() {
  Outcome out;
  const auto dir = std::filesystem::temp_directory_path() /
                   fmt::format("ttsketch-accept-{}", std::chrono::steady_clock::now().time_since_epoch().count());
  std::filesystem::create_directories(dir);
  const DenseTensor small = gen_tt_noise({9, 8, 7, 6, 5}, Ranks{3, 4, 4, 3}, 1e-2, 5);
  const Ranks r{3, 3, 3, 3};
  std::vector<std::function<Decomposition()>> algos{
      [&] { return tt_svd(small, 1e-2); },
      [&] { return tt_svd_fixed_rank(small, r); },
      [&] {
        FixedPrecisionParams p;
        p.eps = 1e-2;
        p.power = 1;
        p.seed = 42;
        return adaptive_rand_tt(small, p);
      },
  };
  for (SketchKind k : kAllSketches) {
    algos.push_back([&, k] {
      FixedRankParams p;
      p.ranks = r;
      p.power = 1;
      p.sketch = k;
      p.seed = 42;
      return rand_tt_fixed_rank(small, p);
    });
  }
  algos.push_back([&] {
    FixedRankParams p;
    p.ranks = r;
    p.power = 2;
    p.seed = 42;
    return rand_tt_fixed_rank_gram(small, p);
  });
  int identical = 0;
  for (Index i = 0; i < algos.size(); ++i) {
    const auto a = dir / fmt::format("a{}.ttc", i);
    const auto b = dir / fmt::format("b{}.ttc", i);
    tt_write(algos[i]().tt, a);
    tt_write(algos[i]().tt, b);
    const std::string x = file_bytes(a);
    if (!x.empty() && x == file_bytes(b)) ++identical;
  }
  std::filesystem::remove_all(dir);
  const bool same = identical == static_cast<int>(algos.size());

  const DenseTensor big = gen_tt_noise(Dims(5, 20), Ranks(4, 10), 1e-4, 11);
  const Ranks big_ranks(4, 10);
  int faster = 0;
  std::vector<std::string> times;
  for (std::uint64_t run = 0; run < 3; ++run) {
    auto t0 = std::chrono::steady_clock::now();
    const Decomposition det = tt_svd_fixed_rank(big, big_ranks);
    const double t_svd = seconds_since(t0);
    FixedRankParams p;
    p.ranks = big_ranks;
    p.seed = run;
    t0 = std::chrono::steady_clock::now();
    const Decomposition rnd = rand_tt_fixed_rank(big, p);
    const double t_rand = seconds_since(t0);
    if (det.ranks() != big_ranks || rnd.ranks() != big_ranks) continue;
    if (t_rand < t_svd) ++faster;
    times.push_back(fmt::format("{:.0f}/{:.0f} ms", 1e3 * t_rand, 1e3 * t_svd));
  }
  out.pass = same && faster == 3;
  out.detail = fmt::format("{}/{} algorithms byte-identical; rand faster {}/3 (rand/tt_svd: {})", identical,
                           algos.size(), faster, fmt::join(times, ", "));
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"rank table on smooth-function tensors", rank_table},
      {"TT-SVD error bound", svd_bound},
      {"exact-rank recovery", exact_recovery},
      {"power iteration benefit", power_benefit},
      {"telescoping residuals and Gram estimator", telescoping},
      {"rank dominance", rank_dominance},
      {"sketch oracle equivalence", sketch_oracles},
      {"determinism and speed smoke check", determinism_and_speed},
  };
  int failed = 0;
  for (Index i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failed;
    fmt::print("{} criterion {} ({}): {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail, seconds_since(t0));
    std::fflush(stdout);
  }
  return failed;
}
