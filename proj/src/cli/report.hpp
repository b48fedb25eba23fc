#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttsketch/dense_tensor.hpp"

namespace ttsketch::cli {

/// One decomposition run as reported in CSV.
struct RunRecord {
  std::string method;
  std::string sketch;     ///< empty for deterministic methods
  std::string rank_spec;  ///< requested ranks, comma separated; empty for eps methods
  std::optional<double> eps;
  std::optional<Index> oversample;
  std::optional<unsigned> power;
  std::optional<Index> block;
  std::optional<std::uint64_t> seed;
  Index trial = 0;
  std::vector<Index> tt_ranks;
  std::optional<double> re;  ///< empty when not verified
  double wall_ms = 0.0;
  std::optional<double> estimator;
  bool clamped = false;
};

inline constexpr std::string_view kCsvHeader =
    "method,sketch,rank_spec,eps,R,q,b,seed,trial,tt_ranks,re,fit,wall_ms,estimator,clamped";

std::string join(const std::vector<Index>& values);
std::string csv_row(const RunRecord& r);

/// Per-point summary over trials of the same configuration.
struct AggregateRow {
  std::string point;  ///< value of the sweep axis
  RunRecord config;   ///< first trial's record; run-specific fields ignored
  Index trials = 0;
  double re_mean = 0.0;
  double re_std = 0.0;
  double fit_mean = 0.0;
  double wall_ms_mean = 0.0;
  double wall_ms_std = 0.0;
  bool clamped_any = false;
  bool verified = false;
};

inline constexpr std::string_view kAggregateHeader =
    "point,method,sketch,rank_spec,eps,R,q,b,seed,trials,re_mean,re_std,fit_mean,wall_ms_mean,wall_ms_std,"
    "clamped";

/// Sample mean and standard deviation (n - 1 denominator; 0 for n = 1).
std::pair<double, double> mean_std(const std::vector<double>& v);
std::string csv_row(const AggregateRow& a);

}  // namespace ttsketch::cli
