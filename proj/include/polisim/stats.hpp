#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace polisim {

/// Percentile with linear interpolation between closest ranks: sorted values
/// x[0..n-1], h = (n - 1) * q, result x[floor h] + frac(h) * (x[floor h + 1] - x[floor h]).
/// q in [0, 1]; throws ValidationError on an empty input.
double percentile(std::span<const double> values, double q);

double median(std::span<const double> values);
double mean(std::span<const double> values);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

struct BootstrapConfig {
  std::size_t resamples = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 12345;
};

namespace serial {
/// Percentile bootstrap of the median. Resample r draws from its own stream
/// derived from (seed, r), so the result does not depend on scheduling.
ConfidenceInterval bootstrap_median_ci(std::span<const double> values, const BootstrapConfig& cfg);
}  // namespace serial

namespace parallel {
/// OpenMP version of serial::bootstrap_median_ci; bit-identical output.
ConfidenceInterval bootstrap_median_ci(std::span<const double> values, const BootstrapConfig& cfg);
}  // namespace parallel

}  // namespace polisim
