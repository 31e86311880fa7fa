#pragma once

// Estimators used by the Monte Carlo harness: Wilson and normal intervals,
// factorial moments and the total-variation distance to a Poisson law.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rgglab {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;

  [[nodiscard]] double half_width() const noexcept { return 0.5 * (high - low); }
  [[nodiscard]] bool contains(double v) const noexcept { return low <= v && v <= high; }
};

/// Wilson score interval for successes out of trials, clipped so that it
/// always contains the point estimate.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95) {
  if (trials == 0) throw std::invalid_argument("wilson interval needs at least one trial");
  if (successes > trials) throw std::invalid_argument("more successes than trials");
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  Interval out{p, std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) out.low = 0.0;
  if (successes == trials) out.high = 1.0;
  out.low = std::min(out.low, p);
  out.high = std::max(out.high, p);
  return out;
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
  std::size_t count = 0;

  [[nodiscard]] Interval interval(double z = kZ95) const noexcept {
    return Interval{mean, mean - z * std_error, mean + z * std_error};
  }
};

inline MeanEstimate mean_estimate(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of no samples");
  const double count = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / count;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (count - 1.0) : 0.0;
  return MeanEstimate{mean, std::sqrt(var / count), xs.size()};
}

inline MeanEstimate mean_estimate(std::span<const std::size_t> xs) {
  std::vector<double> d(xs.begin(), xs.end());
  return mean_estimate(std::span<const double>(d));
}

/// x (x-1) ... (x-k+1).
inline double falling_factorial(std::size_t x, std::size_t k) noexcept {
  double out = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (x < j + 1) return 0.0;
    out *= static_cast<double>(x - j);
  }
  return out;
}

/// Sample k-th factorial moment with its standard error.
inline MeanEstimate factorial_moment(std::span<const std::size_t> samples, std::size_t k) {
  if (k < 1) throw std::invalid_argument("factorial moment order must be at least 1");
  if (samples.empty()) throw std::invalid_argument("factorial moment of no samples");
  std::vector<double> terms;
  terms.reserve(samples.size());
  for (std::size_t x : samples) terms.push_back(falling_factorial(x, k));
  return mean_estimate(std::span<const double>(terms));
}

inline double factorial_moment_estimate(std::span<const std::size_t> samples, std::size_t k) {
  return factorial_moment(samples, k).mean;
}

inline double poisson_pmf(std::size_t j, double mu) {
  if (mu == 0.0) return j == 0 ? 1.0 : 0.0;
  const double jd = static_cast<double>(j);
  return std::exp(jd * std::log(mu) - mu - std::lgamma(jd + 1.0));
}

/// Total variation distance between the empirical law of `samples` and
/// Poisson(mu). Mass above max(samples) counts fully.
inline double poisson_tv_distance(std::span<const std::size_t> samples, double mu) {
  if (samples.empty()) throw std::invalid_argument("tv distance of no samples");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson mean must be finite and >= 0");
  const std::size_t top = *std::max_element(samples.begin(), samples.end());
  std::vector<std::size_t> freq(top + 1, 0);
  for (std::size_t x : samples) ++freq[x];
  const double count = static_cast<double>(samples.size());
  double sum = 0.0;
  double covered = 0.0;
  for (std::size_t j = 0; j <= top; ++j) {
    const double q = poisson_pmf(j, mu);
    covered += q;
    sum += std::fabs(static_cast<double>(freq[j]) / count - q);
  }
  sum += std::max(0.0, 1.0 - covered);
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

}  // namespace rgglab
