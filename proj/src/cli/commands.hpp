#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "report.hpp"
#include "ttsketch/decompose.hpp"
#include "ttsketch/generators.hpp"
#include "ttsketch/sketch.hpp"

namespace ttsketch::cli {

/// Bad flag combination; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { kTTSvd, kTTSvdRank, kRand, kRandGram, kGreedy, kAdaptive };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
/// Methods driven by a rank vector rather than eps.
bool uses_ranks(Method m);
bool is_randomized(Method m);

struct MethodConfig {
  Method method = Method::kTTSvd;
  std::vector<Index> ranks;
  std::optional<double> eps;
  Index oversample = 10;
  unsigned power = 0;
  Index block = 10;
  SketchKind sketch = SketchKind::kGaussian;
  std::uint64_t seed = 0;
};

/// Throws UsageError when the configuration cannot run.
void validate(const MethodConfig& c);

struct RunResult {
  std::optional<Decomposition> decomposition;  ///< empty for greedy
  std::vector<Index> ranks;
  double wall_ms = 0.0;
};

/// Runs one decomposition; wall_ms covers the algorithm call only.
RunResult run_method(const DenseTensor& t, const MethodConfig& c);

RunRecord make_record(const MethodConfig& c, const RunResult& r, Index trial);

/// Relative error by dense contraction, or nothing above `budget` entries.
std::optional<double> verify_error(const DenseTensor& t, const Decomposition& d, Index budget);

/// "a,b,c" or "start:stop:step".
std::vector<Index> parse_index_list(std::string_view text, std::string_view flag);
std::vector<double> parse_double_list(std::string_view text, std::string_view flag);

/// Worker cap from TT_SKETCH_THREADS, else the hardware thread count.
unsigned thread_cap();

inline constexpr Index kDefaultVerifyBudget = Index{1} << 27;

struct GenOptions {
  std::string family;
  std::string dims;
  std::string core_ranks;
  std::optional<double> gamma;
  std::optional<double> snr_db;
  std::optional<Index> extent;
  std::uint64_t seed = 0;
};

/// Validated generator spec; throws UsageError on missing or stray flags.
GenSpec to_gen_spec(const GenOptions& o);

struct DecomposeOptions {
  std::string method;
  std::string in;
  std::string out;
  std::string ranks;
  std::optional<double> eps;
  Index oversample = 10;
  std::optional<unsigned> power;
  Index block = 10;
  std::string sketch = "gaussian";
  std::uint64_t seed = 0;
  std::string report;
  bool verify = false;
  Index verify_budget = kDefaultVerifyBudget;
};

struct BenchOptions {
  GenOptions data;
  std::string in;
  std::optional<std::string> ranks_sweep;
  std::optional<std::string> eps_sweep;
  std::optional<std::string> snr_sweep;
  std::string methods = "rand";
  std::string powers = "0";
  std::string sketches = "gaussian";
  std::string ranks;           ///< fixed ranks for an SNR sweep
  std::optional<double> eps;   ///< fixed eps for an SNR sweep
  Index oversample = 10;
  Index block = 10;
  Index trials = 1;
  bool aggregate = false;
  bool parallel_trials = false;
  std::uint64_t seed = 0;
  std::string report;
  Index verify_budget = kDefaultVerifyBudget;
};

void cmd_gen(const GenOptions& o, const std::string& out_path, std::ostream& out);
void cmd_decompose(const DecomposeOptions& o, std::ostream& out);
void cmd_bench(const BenchOptions& o, std::ostream& out);

}  // namespace ttsketch::cli
