#include "polisim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polisim/errors.hpp"
#include "polisim/rng.hpp"

namespace polisim {

namespace {

double percentile_sorted(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double resample_median(std::span<const double> values, const BootstrapConfig& cfg, std::size_t r,
                       std::vector<double>& scratch) {
  Rng rng(derive_seed(cfg.seed, r));
  scratch.resize(values.size());
  for (double& v : scratch) v = values[rng.index(values.size())];
  std::sort(scratch.begin(), scratch.end());
  return percentile_sorted(scratch, 0.5);
}

ConfidenceInterval interval_from(std::vector<double>& medians, double confidence) {
  std::sort(medians.begin(), medians.end());
  const double alpha = 1.0 - confidence;
  return {percentile_sorted(medians, alpha / 2.0), percentile_sorted(medians, 1.0 - alpha / 2.0)};
}

void check_bootstrap_args(std::span<const double> values, const BootstrapConfig& cfg) {
  if (values.empty()) throw ValidationError("bootstrap of an empty sample");
  if (cfg.resamples == 0) throw ValidationError("bootstrap needs at least one resample");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
    throw ValidationError("bootstrap confidence must lie in (0, 1)");
  }
}

}  // namespace

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile rank outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, q);
}

double median(std::span<const double> values) { return percentile(values, 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

namespace serial {

ConfidenceInterval bootstrap_median_ci(std::span<const double> values, const BootstrapConfig& cfg) {
  check_bootstrap_args(values, cfg);
  std::vector<double> medians(cfg.resamples);
  std::vector<double> scratch;
  for (std::size_t r = 0; r < cfg.resamples; ++r) {
    medians[r] = resample_median(values, cfg, r, scratch);
  }
  return interval_from(medians, cfg.confidence);
}

}  // namespace serial

namespace parallel {

ConfidenceInterval bootstrap_median_ci(std::span<const double> values, const BootstrapConfig& cfg) {
  check_bootstrap_args(values, cfg);
  std::vector<double> medians(cfg.resamples);
  const auto n = static_cast<std::int64_t>(cfg.resamples);
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      medians[static_cast<std::size_t>(r)] =
          resample_median(values, cfg, static_cast<std::size_t>(r), scratch);
    }
  }
  return interval_from(medians, cfg.confidence);
}

}  // namespace parallel

}  // namespace polisim
