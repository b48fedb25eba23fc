#pragma once

#include <filesystem>

#include "ttsketch/dense_tensor.hpp"
#include "ttsketch/tt_tensor.hpp"

namespace ttsketch {

// Both formats are little-endian: a 4-byte magic, u64 N, u64 extents, then
// raw doubles in first-index-fastest order. TTC1 adds u64 ranks[N-1]
// before the cores.

void write_tensor(const DenseTensor& t, const std::filesystem::path& path);
/// Throws FormatError on a bad magic, truncation or trailing bytes.
DenseTensor read_tensor(const std::filesystem::path& path);

void tt_write(const TTTensor& tt, const std::filesystem::path& path);
/// Throws FormatError on malformed bytes and InvalidStructure on an
/// inconsistent rank chain.
TTTensor tt_read(const std::filesystem::path& path);

}  // namespace ttsketch
