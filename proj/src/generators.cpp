#include "ttsketch/generators.hpp"

#include <cmath>

#include <Eigen/QR>
#include <fmt/format.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

namespace {

// Ids are fixed per role so that changing gamma or the SNR never perturbs
// the signal, and sit far from the small per-stage ids the decompositions
// use, so equal seeds never correlate the data with a sketch.
constexpr std::uint64_t kCoreStream = 0x6765'6e00'0000'0001ULL;
constexpr std::uint64_t kNoiseStream = 0x6765'6e00'0000'0002ULL;

void check_tt_shape(const Dims& dims, std::span<const Index> ranks) {
  if (dims.size() < 2) throw InvalidArgument("tt generators need at least 2 modes");
  if (ranks.size() + 1 != dims.size()) {
    throw InvalidArgument(
        fmt::format("expected {} core ranks for {} modes, got {}", dims.size() - 1, dims.size(), ranks.size()));
  }
  for (Index d : dims) {
    if (d == 0) throw InvalidArgument("tensor extents must be positive");
  }
  for (Index r : ranks) {
    if (r == 0) throw InvalidArgument("core ranks must be positive");
  }
}

DenseTensor tt_signal(const Dims& dims, std::span<const Index> ranks, std::uint64_t seed) {
  Stream rng(seed, kCoreStream);
  return tt_contract(random_tt(dims, ranks, rng));
}

void add_scaled_noise(DenseTensor& out, const DenseTensor& noise, double scale) {
  auto x = out.data();
  const auto n = noise.data();
  for (Index i = 0; i < x.size(); ++i) x[i] += scale * n[i];
}

}  // namespace

std::string_view to_string(GenFamily f) {
  switch (f) {
    case GenFamily::kTTNoise: return "tt-noise";
    case GenFamily::kTTSnr: return "tt-snr";
    case GenFamily::kFuncSin: return "func-sin";
    case GenFamily::kFuncHilbert: return "func-hilbert";
  }
  return "?";
}

GenFamily parse_gen_family(std::string_view name) {
  for (auto f : {GenFamily::kTTNoise, GenFamily::kTTSnr, GenFamily::kFuncSin, GenFamily::kFuncHilbert}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument(fmt::format("unknown generator family '{}'", name));
}

void validate(const GenSpec& spec) {
  switch (spec.family) {
    case GenFamily::kTTNoise:
      check_tt_shape(spec.dims, spec.core_ranks);
      if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) {
        throw InvalidArgument("gamma must be finite and >= 0");
      }
      break;
    case GenFamily::kTTSnr:
      check_tt_shape(spec.dims, spec.core_ranks);
      if (!std::isfinite(spec.snr_db)) throw InvalidArgument("snr_db must be finite");
      break;
    case GenFamily::kFuncSin:
    case GenFamily::kFuncHilbert:
      if (spec.extent < 2) throw InvalidArgument("extent must be >= 2");
      break;
  }
}

DenseTensor generate(const GenSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case GenFamily::kTTNoise: return gen_tt_noise(spec.dims, spec.core_ranks, spec.gamma, spec.seed);
    case GenFamily::kTTSnr: return gen_tt_snr(spec.dims, spec.core_ranks, spec.snr_db, spec.seed);
    case GenFamily::kFuncSin: return gen_func_sin(spec.extent);
    case GenFamily::kFuncHilbert: return gen_func_hilbert(spec.extent);
  }
  throw InvalidArgument("unknown generator family");
}

TTTensor random_tt(const Dims& dims, std::span<const Index> ranks, Stream& rng, bool left_orthonormal) {
  check_tt_shape(dims, ranks);
  const Index order = dims.size();
  std::vector<DenseTensor> cores;
  cores.reserve(order);
  for (Index n = 0; n < order; ++n) {
    const Index r0 = n == 0 ? 1 : ranks[n - 1];
    const Index r1 = n + 1 == order ? 1 : ranks[n];
    DenseTensor core = random_dense(Dims{r0, dims[n], r1}, rng);
    if (left_orthonormal && n + 1 < order) {
      const Index rows = r0 * dims[n];
      if (rows < r1) {
        throw InvalidArgument(fmt::format("core {} cannot be left-orthonormal: {} rows < rank {}", n + 1, rows, r1));
      }
      auto m = core.as_matrix(rows, r1);
      const Eigen::HouseholderQR<Matrix> qr(m);
      m = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(r1));
    }
    cores.push_back(std::move(core));
  }
  return TTTensor(std::move(cores));
}

DenseTensor random_dense(const Dims& dims, Stream& rng) {
  DenseTensor t(dims);
  rng.fill_normal(t.data());
  return t;
}

DenseTensor gen_tt_noise(const Dims& dims, std::span<const Index> core_ranks, double gamma,
                         std::uint64_t seed) {
  check_tt_shape(dims, core_ranks);
  DenseTensor out = tt_signal(dims, core_ranks, seed);
  if (gamma == 0.0) return out;
  Stream noise_rng(seed, kNoiseStream);
  const DenseTensor noise = random_dense(dims, noise_rng);
  const double scale = gamma * frobenius_norm(out) / std::sqrt(static_cast<double>(out.size()));
  add_scaled_noise(out, noise, scale);
  return out;
}

DenseTensor gen_tt_snr(const Dims& dims, std::span<const Index> core_ranks, double snr_db,
                       std::uint64_t seed) {
  check_tt_shape(dims, core_ranks);
  if (!std::isfinite(snr_db)) throw InvalidArgument("snr_db must be finite");
  DenseTensor out = tt_signal(dims, core_ranks, seed);
  Stream noise_rng(seed, kNoiseStream);
  const DenseTensor noise = random_dense(dims, noise_rng);
  const double beta = frobenius_norm(out) / (frobenius_norm(noise) * std::pow(10.0, snr_db / 20.0));
  add_scaled_noise(out, noise, beta);
  return out;
}

DenseTensor gen_func_sin(Index extent) {
  if (extent < 2) throw InvalidArgument("extent must be >= 2");
  const Index n = extent;
  std::vector<double> sq(n);
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    sq[i] = x * x;
  }
  DenseTensor t(Dims(5, n));
  auto out = t.data();
  Index k = 0;
  for (Index i5 = 0; i5 < n; ++i5)
    for (Index i4 = 0; i4 < n; ++i4)
      for (Index i3 = 0; i3 < n; ++i3)
        for (Index i2 = 0; i2 < n; ++i2) {
          const double partial = sq[i5] + sq[i4] + sq[i3] + sq[i2];
          for (Index i1 = 0; i1 < n; ++i1) out[k++] = std::sin(std::sqrt(partial + sq[i1]));
        }
  return t;
}

DenseTensor gen_func_hilbert(Index extent) {
  if (extent < 2) throw InvalidArgument("extent must be >= 2");
  const Index n = extent;
  const double num = static_cast<double>(n - 1);
  DenseTensor t(Dims(5, n));
  auto out = t.data();
  Index k = 0;
  // 1-based index sum i_1 + ... + i_5 = (0-based sum) + 5.
  for (Index i5 = 0; i5 < n; ++i5)
    for (Index i4 = 0; i4 < n; ++i4)
      for (Index i3 = 0; i3 < n; ++i3)
        for (Index i2 = 0; i2 < n; ++i2) {
          const Index partial = n + 5 + i5 + i4 + i3 + i2;
          for (Index i1 = 0; i1 < n; ++i1) out[k++] = num / static_cast<double>(partial + i1);
        }
  return t;
}

}  // namespace ttsketch
