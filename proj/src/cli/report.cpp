#include "report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ttsketch::cli {

namespace {

template <class T>
std::string opt(const std::optional<T>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

std::string quoted(const std::string& s) { return s.empty() ? s : "\"" + s + "\""; }

std::string config_fields(const RunRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", r.method, r.sketch, quoted(r.rank_spec), opt(r.eps),
                     opt(r.oversample), opt(r.power), opt(r.block), opt(r.seed));
}

}  // namespace

std::string join(const std::vector<Index>& values) { return fmt::format("{}", fmt::join(values, ",")); }

std::string csv_row(const RunRecord& r) {
  const std::string re = r.re ? fmt::format("{}", *r.re) : std::string();
  const std::string fit = r.re ? fmt::format("{}", 1.0 - *r.re) : std::string();
  return fmt::format("{},{},{},{},{},{:.3f},{},{}", config_fields(r), r.trial, quoted(join(r.tt_ranks)), re, fit,
                     r.wall_ms, opt(r.estimator), r.clamped ? 1 : 0);
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

std::string csv_row(const AggregateRow& a) {
  const auto num = [&](double x) { return a.verified ? fmt::format("{}", x) : std::string(); };
  return fmt::format("{},{},{},{},{},{},{:.3f},{:.3f},{}", a.point, config_fields(a.config), a.trials,
                     num(a.re_mean), num(a.re_std), num(a.fit_mean), a.wall_ms_mean, a.wall_ms_std,
                     a.clamped_any ? 1 : 0);
}

}  // namespace ttsketch::cli
