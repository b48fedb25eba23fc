#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ttsketch/errors.hpp"
#include "ttsketch/io.hpp"
#include "ttsketch/metrics.hpp"

namespace ttsketch::cli {

namespace {

constexpr Method kAllMethods[] = {Method::kTTSvd,    Method::kTTSvdRank, Method::kRand,
                                  Method::kRandGram, Method::kGreedy,    Method::kAdaptive};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <class T>
T parse_number(std::string_view s, std::string_view flag) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(fmt::format("{}: cannot parse '{}'", flag, s));
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view text, std::string_view flag) {
  if (text.empty()) throw UsageError(fmt::format("{}: empty list", flag));
  const auto parts = split(text, ':');
  std::vector<T> out;
  if (parts.size() == 3) {
    const T start = parse_number<T>(parts[0], flag);
    const T stop = parse_number<T>(parts[1], flag);
    const T step = parse_number<T>(parts[2], flag);
    if (!(step > T{0})) throw UsageError(fmt::format("{}: range step must be positive", flag));
    if (stop < start) throw UsageError(fmt::format("{}: empty range {}", flag, text));
    // Index-based stepping keeps floating ranges free of accumulated drift.
    for (Index k = 0;; ++k) {
      const T v = static_cast<T>(start + static_cast<T>(k) * step);
      if constexpr (std::is_floating_point_v<T>) {
        if (v > stop + 1e-9 * step) break;
      } else {
        if (v > stop) break;
      }
      out.push_back(v);
    }
    return out;
  }
  if (parts.size() != 1) throw UsageError(fmt::format("{}: expected a list or start:stop:step", flag));
  for (auto item : split(text, ',')) out.push_back(parse_number<T>(item, flag));
  return out;
}

SketchKind parse_sketch(std::string_view name) {
  try {
    return parse_sketch_kind(name);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

std::string format_dims(const Dims& dims) { return fmt::format("{}", fmt::join(dims, "x")); }

// Output sink: a file when a path is given, otherwise the supplied stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::trunc);
      if (!file_) throw IoError(fmt::format("cannot open {} for writing", path));
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void line(std::string_view s) {
    *out_ << s << '\n';
    out_->flush();
    if (!*out_) throw IoError("failed writing report");
  }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kTTSvd: return "tt-svd";
    case Method::kTTSvdRank: return "tt-svd-rank";
    case Method::kRand: return "rand";
    case Method::kRandGram: return "rand-gram";
    case Method::kGreedy: return "greedy";
    case Method::kAdaptive: return "adaptive";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw UsageError(fmt::format(
      "unknown method '{}' (expected tt-svd, tt-svd-rank, rand, rand-gram, greedy, adaptive)", name));
}

bool uses_ranks(Method m) { return m == Method::kTTSvdRank || m == Method::kRand || m == Method::kRandGram; }

bool is_randomized(Method m) { return m == Method::kRand || m == Method::kRandGram || m == Method::kAdaptive; }

void validate(const MethodConfig& c) {
  const auto name = to_string(c.method);
  if (uses_ranks(c.method)) {
    if (c.ranks.empty()) throw UsageError(fmt::format("{} requires --ranks", name));
    if (c.eps) throw UsageError(fmt::format("{} takes --ranks, not --eps", name));
    if (std::find(c.ranks.begin(), c.ranks.end(), Index{0}) != c.ranks.end()) {
      throw UsageError("--ranks entries must be >= 1");
    }
  } else {
    if (!c.eps) throw UsageError(fmt::format("{} requires --eps", name));
    if (!c.ranks.empty()) throw UsageError(fmt::format("{} takes --eps, not --ranks", name));
    if (!(*c.eps > 0.0 && *c.eps < 1.0)) throw UsageError("--eps must lie in (0, 1)");
  }
  if (c.method == Method::kRandGram) {
    if (c.power < 1) throw UsageError("rand-gram requires --power >= 1");
    if (c.sketch != SketchKind::kGaussian) throw UsageError("rand-gram supports only --sketch gaussian");
  }
  if (c.method == Method::kAdaptive && c.block < 1) throw UsageError("--block must be >= 1");
}

RunResult run_method(const DenseTensor& t, const MethodConfig& c) {
  validate(c);
  RunResult r;
  const auto start = std::chrono::steady_clock::now();
  switch (c.method) {
    case Method::kTTSvd: r.decomposition = tt_svd(t, *c.eps); break;
    case Method::kTTSvdRank: r.decomposition = tt_svd_fixed_rank(t, c.ranks); break;
    case Method::kRand:
    case Method::kRandGram: {
      FixedRankParams p;
      p.ranks = c.ranks;
      p.oversample = c.oversample;
      p.power = c.power;
      p.sketch = c.sketch;
      p.seed = c.seed;
      r.decomposition = c.method == Method::kRand ? rand_tt_fixed_rank(t, p) : rand_tt_fixed_rank_gram(t, p);
      break;
    }
    case Method::kGreedy: r.ranks = greedy_tt_rank(t, *c.eps); break;
    case Method::kAdaptive: {
      FixedPrecisionParams p;
      p.eps = *c.eps;
      p.block = c.block;
      p.power = c.power;
      p.sketch = c.sketch;
      p.seed = c.seed;
      r.decomposition = adaptive_rand_tt(t, p);
      break;
    }
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (r.decomposition) r.ranks = r.decomposition->ranks();
  return r;
}

RunRecord make_record(const MethodConfig& c, const RunResult& r, Index trial) {
  RunRecord rec;
  rec.method = std::string(to_string(c.method));
  const bool random = is_randomized(c.method);
  if (random) {
    rec.sketch = std::string(to_string(c.sketch));
    rec.seed = c.seed;
    rec.power = c.power;
  }
  if (uses_ranks(c.method)) {
    rec.rank_spec = join(c.ranks);
  } else {
    rec.eps = c.eps;
  }
  if (c.method == Method::kRand || c.method == Method::kRandGram) rec.oversample = c.oversample;
  if (c.method == Method::kAdaptive) rec.block = c.block;
  rec.trial = trial;
  rec.tt_ranks = r.ranks;
  rec.wall_ms = r.wall_ms;
  if (r.decomposition) {
    rec.estimator = r.decomposition->estimator();
    rec.clamped = r.decomposition->clamped();
  }
  return rec;
}

std::optional<double> verify_error(const DenseTensor& t, const Decomposition& d, Index budget) {
  if (t.size() > budget) return std::nullopt;
  return relative_error(t, tt_contract(d.tt));
}

std::vector<Index> parse_index_list(std::string_view text, std::string_view flag) {
  return parse_list<Index>(text, flag);
}

std::vector<double> parse_double_list(std::string_view text, std::string_view flag) {
  return parse_list<double>(text, flag);
}

unsigned thread_cap() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("TT_SKETCH_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  const auto n = parse_number<unsigned>(env, "TT_SKETCH_THREADS");
  if (n == 0) throw UsageError("TT_SKETCH_THREADS must be >= 1");
  return n;
}

GenSpec to_gen_spec(const GenOptions& o) {
  if (o.family.empty()) throw UsageError("--family is required");
  GenSpec spec;
  try {
    spec.family = parse_gen_family(o.family);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  spec.seed = o.seed;
  const bool tt = spec.family == GenFamily::kTTNoise || spec.family == GenFamily::kTTSnr;
  if (tt) {
    if (o.dims.empty()) throw UsageError(fmt::format("{} requires --dims", o.family));
    if (o.core_ranks.empty()) throw UsageError(fmt::format("{} requires --core-ranks", o.family));
    if (o.extent) throw UsageError(fmt::format("{} takes --dims, not --extent", o.family));
    spec.dims = parse_index_list(o.dims, "--dims");
    spec.core_ranks = parse_index_list(o.core_ranks, "--core-ranks");
    if (spec.family == GenFamily::kTTNoise) {
      if (o.snr_db) throw UsageError("tt-noise takes --gamma, not --snr-db");
      spec.gamma = o.gamma.value_or(0.0);
    } else {
      if (o.gamma) throw UsageError("tt-snr takes --snr-db, not --gamma");
      if (!o.snr_db) throw UsageError("tt-snr requires --snr-db");
      spec.snr_db = *o.snr_db;
    }
  } else {
    if (!o.dims.empty() || !o.core_ranks.empty() || o.gamma || o.snr_db) {
      throw UsageError(fmt::format("{} takes only --extent", o.family));
    }
    spec.extent = o.extent.value_or(40);
  }
  try {
    validate(spec);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

void cmd_gen(const GenOptions& o, const std::string& out_path, std::ostream& out) {
  const GenSpec spec = to_gen_spec(o);
  const DenseTensor t = generate(spec);
  write_tensor(t, out_path);
  fmt::print(out, "dims {} norm {}\n", format_dims(t.dims()), frobenius_norm(t));
}

void cmd_decompose(const DecomposeOptions& o, std::ostream& out) {
  MethodConfig c;
  c.method = parse_method(o.method);
  if (!o.ranks.empty()) c.ranks = parse_index_list(o.ranks, "--ranks");
  c.eps = o.eps;
  c.oversample = o.oversample;
  c.power = o.power.value_or(c.method == Method::kRandGram ? 1u : 0u);
  c.block = o.block;
  c.sketch = parse_sketch(o.sketch);
  c.seed = o.seed;
  validate(c);
  if (c.method == Method::kGreedy && !o.out.empty()) {
    throw UsageError("greedy estimates ranks only and writes no TT file; drop --out");
  }

  const DenseTensor t = read_tensor(o.in);
  if (uses_ranks(c.method) && c.ranks.size() + 1 != t.order()) {
    throw UsageError(fmt::format("--ranks needs {} entries for the {}-way input {}", t.order() - 1, t.order(),
                                 format_dims(t.dims())));
  }
  const RunResult r = run_method(t, c);
  RunRecord rec = make_record(c, r, 0);
  if (r.decomposition) {
    if (o.verify) rec.re = verify_error(t, *r.decomposition, o.verify_budget);
    if (!o.out.empty()) tt_write(r.decomposition->tt, o.out);
  }
  Sink sink(o.report, out);
  sink.line(kCsvHeader);
  sink.line(csv_row(rec));
}

void cmd_bench(const BenchOptions& o, std::ostream& out) {
  const int axes = int{o.ranks_sweep.has_value()} + int{o.eps_sweep.has_value()} + int{o.snr_sweep.has_value()};
  if (axes != 1) throw UsageError("give exactly one of --ranks-sweep, --eps-sweep, --snr-sweep");
  if (o.trials < 1) throw UsageError("--trials must be >= 1");

  std::vector<Method> methods;
  for (auto name : split(o.methods, ',')) methods.push_back(parse_method(name));
  const auto powers = parse_index_list(o.powers, "--powers");
  std::vector<SketchKind> sketches;
  for (auto name : split(o.sketches, ',')) sketches.push_back(parse_sketch(name));

  const bool snr_axis = o.snr_sweep.has_value();
  const bool ranks_axis = o.ranks_sweep.has_value();
  for (auto m : methods) {
    if (ranks_axis && !uses_ranks(m)) {
      throw UsageError(fmt::format("--ranks-sweep needs rank-driven methods; {} takes eps", to_string(m)));
    }
    if (o.eps_sweep && uses_ranks(m)) {
      throw UsageError(fmt::format("--eps-sweep needs eps-driven methods; {} takes ranks", to_string(m)));
    }
  }

  // Expand methods over powers and sketches; combinations a method cannot
  // run (rand-gram with q = 0 or a structured sketch) are skipped.
  std::vector<MethodConfig> configs;
  for (auto m : methods) {
    if (!is_randomized(m)) {
      MethodConfig c;
      c.method = m;
      configs.push_back(c);
      continue;
    }
    for (Index q : powers) {
      for (auto s : sketches) {
        if (m == Method::kRandGram && (q < 1 || s != SketchKind::kGaussian)) continue;
        MethodConfig c;
        c.method = m;
        c.power = static_cast<unsigned>(q);
        c.sketch = s;
        configs.push_back(c);
      }
    }
  }
  if (configs.empty()) throw UsageError("no runnable method/power/sketch combination");
  for (auto& c : configs) {
    c.oversample = o.oversample;
    c.block = o.block;
  }

  // Sweep points: label plus a function that fills the swept field.
  struct Point {
    std::string label;
    std::function<void(MethodConfig&)> apply;
    std::optional<double> snr;
  };
  std::vector<Point> points;
  std::optional<DenseTensor> fixed_input;
  const bool have_family = !o.data.family.empty();
  if (snr_axis) {
    if (!o.in.empty()) throw UsageError("--snr-sweep regenerates data; it cannot read --in");
    if (have_family && o.data.family != "tt-snr") throw UsageError("--snr-sweep requires --family tt-snr");
    std::vector<Index> ranks;
    if (!o.ranks.empty()) ranks = parse_index_list(o.ranks, "--ranks");
    for (double snr : parse_double_list(*o.snr_sweep, "--snr-sweep")) {
      points.push_back({fmt::format("{}", snr),
                        [ranks, eps = o.eps](MethodConfig& c) {
                          if (uses_ranks(c.method)) {
                            c.ranks = ranks;
                          } else {
                            c.eps = eps;
                          }
                        },
                        snr});
    }
  } else {
    if (have_family == !o.in.empty()) throw UsageError("give exactly one of --in or --family");
    if (!o.ranks.empty() || o.eps) throw UsageError("--ranks/--eps are fixed values for --snr-sweep only");
    if (ranks_axis) {
      for (Index mu : parse_index_list(*o.ranks_sweep, "--ranks-sweep")) {
        points.push_back({fmt::format("{}", mu), [mu](MethodConfig& c) { c.ranks.assign(c.ranks.size(), mu); }, {}});
      }
    } else {
      for (double eps : parse_double_list(*o.eps_sweep, "--eps-sweep")) {
        points.push_back({fmt::format("{}", eps), [eps](MethodConfig& c) { c.eps = eps; }, {}});
      }
    }
  }

  GenOptions gen = o.data;
  gen.seed = o.seed;
  if (snr_axis) gen.family = "tt-snr";
  if (!snr_axis) {
    fixed_input = o.in.empty() ? generate(to_gen_spec(gen)) : read_tensor(o.in);
  } else {
    // Validate the generator flags once before the sweep starts.
    GenOptions probe = gen;
    probe.snr_db = 0.0;
    to_gen_spec(probe);
  }

  const unsigned workers = o.parallel_trials ? thread_cap() : 1u;
  Sink sink(o.report, out);
  sink.line(o.aggregate ? kAggregateHeader : kCsvHeader);

  for (const auto& point : points) {
    DenseTensor snr_input;
    if (point.snr) {
      GenOptions g = gen;
      g.snr_db = *point.snr;
      snr_input = generate(to_gen_spec(g));
    }
    const DenseTensor& input = point.snr ? snr_input : *fixed_input;

    // One job per (config, trial); trial t always uses seed + t.
    std::vector<MethodConfig> jobs;
    for (auto c : configs) {
      if (uses_ranks(c.method)) c.ranks.assign(input.order() - 1, 0);
      point.apply(c);
      if (uses_ranks(c.method) && c.ranks.size() + 1 != input.order()) {
        throw UsageError(fmt::format("--ranks needs {} entries", input.order() - 1));
      }
      validate(c);
      for (Index trial = 0; trial < o.trials; ++trial) {
        MethodConfig job = c;
        job.seed = o.seed + trial;
        jobs.push_back(job);
      }
    }
    std::vector<RunRecord> records(jobs.size());
    auto run_job = [&](std::size_t j) {
      const RunResult r = run_method(input, jobs[j]);
      records[j] = make_record(jobs[j], r, static_cast<Index>(j) % o.trials);
      if (r.decomposition) records[j].re = verify_error(input, *r.decomposition, o.verify_budget);
    };
    if (workers <= 1 || jobs.size() <= 1) {
      for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
    } else {
      std::atomic<std::size_t> next{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::thread> pool;
      const auto n = std::min<std::size_t>(workers, jobs.size());
      for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
          for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
            try {
              run_job(j);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
              next = jobs.size();
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      if (failure) std::rethrow_exception(failure);
    }

    if (!o.aggregate) {
      for (const auto& rec : records) sink.line(csv_row(rec));
      continue;
    }
    for (std::size_t base = 0; base < records.size(); base += o.trials) {
      AggregateRow a;
      a.point = point.label;
      a.config = records[base];
      a.config.seed = jobs[base].seed;
      a.trials = o.trials;
      std::vector<double> re;
      std::vector<double> ms;
      a.verified = true;
      for (std::size_t k = base; k < base + o.trials; ++k) {
        if (records[k].re) {
          re.push_back(*records[k].re);
        } else {
          a.verified = false;
        }
        ms.push_back(records[k].wall_ms);
        a.clamped_any = a.clamped_any || records[k].clamped;
      }
      std::tie(a.re_mean, a.re_std) = mean_std(re);
      a.fit_mean = 1.0 - a.re_mean;
      std::tie(a.wall_ms_mean, a.wall_ms_std) = mean_std(ms);
      sink.line(csv_row(a));
    }
  }
}

}  // namespace ttsketch::cli
