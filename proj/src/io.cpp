#include "ttsketch/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

static_assert(std::endian::native == std::endian::little,
              "DNT1/TTC1 are little-endian and are written with raw stores");

namespace {

constexpr std::uint64_t kMaxOrder = 64;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void doubles(std::span<const double> d) { bytes(d.data(), d.size_bytes()); }
  void close() {
    out_.close();
    if (!out_) throw IoError(fmt::format("write to {} failed", path_.string()));
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError(fmt::format("cannot open {}", path.string()));
    std::error_code ec;
    remaining_ = std::filesystem::file_size(path, ec);
    if (ec) throw IoError(fmt::format("cannot stat {}: {}", path.string(), ec.message()));
  }
  void bytes(void* p, std::uint64_t n) {
    if (n > remaining_) throw FormatError(fmt::format("{}: truncated file", path_.string()));
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw FormatError(fmt::format("{}: truncated file", path_.string()));
    remaining_ -= n;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    bytes(&v, sizeof v);
    return v;
  }
  void magic(std::string_view expected) {
    std::array<char, 4> m{};
    bytes(m.data(), m.size());
    if (std::string_view(m.data(), m.size()) != expected) {
      throw FormatError(fmt::format("{}: bad magic, expected {}", path_.string(), expected));
    }
  }
  // Payload sizes are checked against the file size before allocating.
  std::vector<double> doubles(std::uint64_t count) {
    if (count > remaining_ / sizeof(double)) throw FormatError(fmt::format("{}: truncated payload", path_.string()));
    std::vector<double> v(count);
    bytes(v.data(), count * sizeof(double));
    return v;
  }
  void finish() const {
    if (remaining_ != 0) throw FormatError(fmt::format("{}: {} trailing bytes", path_.string(), remaining_));
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t remaining_ = 0;
};

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const std::filesystem::path& path) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw FormatError(fmt::format("{}: declared size overflows", path.string()));
  }
  return a * b;
}

Dims read_dims(Reader& r) {
  const std::uint64_t order = r.u64();
  if (order == 0 || order > kMaxOrder) throw FormatError(fmt::format("{}: implausible order {}", r.path().string(), order));
  Dims dims(order);
  for (auto& d : dims) {
    d = r.u64();
    if (d == 0) throw FormatError(fmt::format("{}: zero extent", r.path().string()));
  }
  return dims;
}

}  // namespace

void write_tensor(const DenseTensor& t, const std::filesystem::path& path) {
  Writer w(path);
  w.bytes("DNT1", 4);
  w.u64(t.order());
  for (Index d : t.dims()) w.u64(d);
  w.doubles(t.data());
  w.close();
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  Reader r(path);
  r.magic("DNT1");
  Dims dims = read_dims(r);
  std::uint64_t count = 1;
  for (Index d : dims) count = checked_mul(count, d, path);
  std::vector<double> data = r.doubles(count);
  r.finish();
  return DenseTensor(std::move(dims), std::move(data));
}

void tt_write(const TTTensor& tt, const std::filesystem::path& path) {
  Writer w(path);
  w.bytes("TTC1", 4);
  w.u64(tt.order());
  for (Index d : tt.dims()) w.u64(d);
  for (Index r : tt.ranks()) w.u64(r);
  for (const auto& core : tt.cores()) w.doubles(core.data());
  w.close();
}

TTTensor tt_read(const std::filesystem::path& path) {
  Reader r(path);
  r.magic("TTC1");
  const Dims dims = read_dims(r);
  const Index order = dims.size();
  std::vector<Index> ranks(order + 1, 1);
  for (Index n = 1; n < order; ++n) {
    ranks[n] = r.u64();
    if (ranks[n] == 0) throw InvalidStructure(fmt::format("{}: rank {} is zero", path.string(), n));
  }
  std::vector<DenseTensor> cores;
  cores.reserve(order);
  for (Index n = 0; n < order; ++n) {
    const std::uint64_t count = checked_mul(checked_mul(ranks[n], dims[n], path), ranks[n + 1], path);
    cores.emplace_back(Dims{ranks[n], dims[n], ranks[n + 1]}, r.doubles(count));
  }
  r.finish();
  return TTTensor(std::move(cores));
}

}  // namespace ttsketch
