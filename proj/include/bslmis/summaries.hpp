#pragma once

#include "bslmis/common.hpp"
#include "bslmis/models.hpp"
#include "bslmis/rng.hpp"

#include <cstdint>
#include <span>

namespace bslmis {

// Moving-block bootstrap settings.
struct BootstrapSpec {
  std::size_t block_len = 10;
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
};

// S_j = (1/n) sum_{t=j+1..n} y_t y_{t-j}: uncentered, divisor n at every lag.
SummaryVec autocov_summaries(const TimeSeries& y, std::span<const std::size_t> lags);
Vector autocov_values(std::span<const double> y, std::span<const std::size_t> lags);

// Type-7 sample quantiles (h = (n-1)p + 1, linear interpolation between order
// statistics). `probs` may be in any order.
std::vector<double> quantiles_type7(std::span<const double> y,
                                    std::span<const double> probs);

// Robust g-and-k summaries: S1 = Q2, S2 = Q3 - Q1, S3 = (Q3 - 2Q2 + Q1)/S2 and,
// when include_tail, S4 = the 1% quantile.
SummaryVec gk_summaries(const TimeSeries& y, bool include_tail);
Vector gk_values(std::span<const double> y, bool include_tail);

// One circular moving-block pseudo-series: ceil(n/L) uniform start indices,
// blocks wrapped around the end, concatenated and truncated to n.
void block_resample(std::span<const double> y, std::size_t block_len, Rng& rng,
                    std::vector<double>& out);

// Sample covariance (divisor n_boot - 1) of summary_fn over n_boot
// circular-block bootstrap replicates. Replicate b draws from
// derive_seed(spec.seed, b), so the result does not depend on `threads`.
Matrix block_bootstrap_cov(const TimeSeries& y, const SummaryFn& summary_fn,
                           const BootstrapSpec& spec, unsigned threads = 1);

}  // namespace bslmis
