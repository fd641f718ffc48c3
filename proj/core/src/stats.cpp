#include "tft/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace tft {

double log_sum_exp(std::span<const double> logs) {
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - top);
  return top + std::log(acc);
}

Estimate exp_mean(std::span<const double> logs, std::size_t batches) {
  const std::size_t n = logs.size();
  if (n == 0) throw std::invalid_argument("exp_mean: empty sample");
  if (batches < 2 || batches > n) throw std::invalid_argument("exp_mean: need 2 <= batches <= n");
  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) throw std::domain_error("exp_mean: non-finite term");

  // Scaled batch sums; the overall mean is exp(top) * total / n.
  std::vector<double> sums(batches, 0.0);
  std::vector<std::size_t> sizes(batches, 0);
  double total = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * n / batches;
    const std::size_t end = (b + 1) * n / batches;
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += std::exp(logs[i] - top);
    sums[b] = acc;
    sizes[b] = end - begin;
    total += acc;
  }
  const double scale = std::exp(top);
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    const double d = sums[b] / static_cast<double>(sizes[b]) - mean;
    ss += d * d;
  }
  const double se = std::sqrt(ss / static_cast<double>(batches * (batches - 1)));
  return {scale * mean, scale * se};
}

double max_summand_share(std::span<const double> logs) {
  if (logs.empty()) return 0.0;
  const double top = *std::max_element(logs.begin(), logs.end());
  return std::exp(top - log_sum_exp(logs));
}

Estimate sample_mean(std::span<const double> values, std::size_t batches) {
  const std::size_t n = values.size();
  if (batches < 2 || batches > n) throw std::invalid_argument("sample_mean: need 2 <= batches <= n");
  double total = 0.0;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = b * n / batches;
    const std::size_t end = (b + 1) * n / batches;
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += values[i];
    total += acc;
    means[b] = acc / static_cast<double>(end - begin);
  }
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return {mean, std::sqrt(ss / static_cast<double>(batches * (batches - 1)))};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  if (hi == lo) return a;
  const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected,
                         double min_expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_pvalue: size mismatch");
  }
  std::vector<double> obs;
  std::vector<double> exp;
  double o = 0.0;
  double e = 0.0;
  for (std::size_t i = observed.size(); i-- > 0;) {
    o += observed[i];
    e += expected[i];
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (obs.empty()) throw std::invalid_argument("chi_square_pvalue: too few expected counts");
    obs.back() += o;
    exp.back() += e;
  }
  if (obs.size() < 2) throw std::invalid_argument("chi_square_pvalue: need at least two cells");
  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  boost::math::chi_squared dist(static_cast<double>(obs.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace tft
