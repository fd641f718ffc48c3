// stats.hpp: small numerical helpers shared by the Monte-Carlo checks.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tft {

struct Estimate {
  double value;
  double se;
};

double log_sum_exp(std::span<const double> logs);

// Mean of exp(logs[i]) with a batch-means standard error over `batches`
// contiguous blocks (index order). Terms are accumulated relative to the
// largest log, so a sample of zeros yields exactly 1 with SE 0.
Estimate exp_mean(std::span<const double> logs, std::size_t batches = 20);

// Largest single summand's share of Σ exp(logs[i]); near 1 flags a mean
// dominated by one trajectory.
double max_summand_share(std::span<const double> logs);

Estimate sample_mean(std::span<const double> values, std::size_t batches = 20);

// Linear-interpolated empirical quantile (type 7) of unsorted data.
double quantile(std::vector<double> values, double q);

// Pearson chi-square upper-tail p-value; cells with expected count below
// `min_expected` are pooled into their neighbour from the right.
double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected,
                         double min_expected = 5.0);

}  // namespace tft
