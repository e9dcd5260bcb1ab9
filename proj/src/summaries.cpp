#include "bslmis/summaries.hpp"

#include "bslmis/linalg.hpp"
#include "bslmis/parallel.hpp"
#include "bslmis/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bslmis {

Vector autocov_values(std::span<const double> y,
                      std::span<const std::size_t> lags) {
  const std::size_t n = y.size();
  Vector s(static_cast<Eigen::Index>(lags.size()));
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t j = lags[i];
    if (j >= n) {
      throw DomainError("lag " + std::to_string(j) + " must be below n = " +
                        std::to_string(n));
    }
    double acc = 0.0;
    for (std::size_t t = j; t < n; ++t) acc += y[t] * y[t - j];
    s(static_cast<Eigen::Index>(i)) = acc / static_cast<double>(n);
  }
  return s;
}

SummaryVec autocov_summaries(const TimeSeries& y,
                             std::span<const std::size_t> lags) {
  SummaryVec out{autocov_values(y.values(), lags), {}};
  for (std::size_t j : lags) out.labels.push_back("S" + std::to_string(j));
  return out;
}

std::vector<double> quantiles_type7(std::span<const double> y,
                                    std::span<const double> probs) {
  const std::size_t n = y.size();
  if (n == 0) throw DomainError("quantile of an empty sample");
  std::vector<double> buf(y.begin(), y.end());
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  std::vector<double> out(probs.size());
  std::size_t sorted_upto = 0;  // buf[0..sorted_upto) is partitioned below
  for (std::size_t idx : order) {
    const double p = probs[idx];
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile p outside [0, 1]");
    const double h = static_cast<double>(n - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    auto first = buf.begin() + static_cast<std::ptrdiff_t>(std::min(sorted_upto, lo));
    std::nth_element(first, buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.end());
    sorted_upto = lo;
    double v = buf[lo];
    if (frac > 0.0 && lo + 1 < n) {
      const double next = *std::min_element(
          buf.begin() + static_cast<std::ptrdiff_t>(lo + 1), buf.end());
      v += frac * (next - v);
    }
    out[idx] = v;
  }
  return out;
}

Vector gk_values(std::span<const double> y, bool include_tail) {
  if (include_tail && y.size() < 100) {
    throw DomainError("the 1% quantile summary needs n >= 100");
  }
  static constexpr double probs3[] = {0.25, 0.5, 0.75};
  static constexpr double probs4[] = {0.25, 0.5, 0.75, 0.01};
  const auto q = include_tail ? quantiles_type7(y, probs4)
                              : quantiles_type7(y, probs3);
  const double iqr = q[2] - q[0];
  if (!(iqr > 0.0)) {
    throw DegenerateSummaryError("interquartile range is zero");
  }
  Vector s(include_tail ? 4 : 3);
  s(0) = q[1];
  s(1) = iqr;
  s(2) = (q[2] - 2.0 * q[1] + q[0]) / iqr;
  if (include_tail) s(3) = q[3];
  return s;
}

SummaryVec gk_summaries(const TimeSeries& y, bool include_tail) {
  SummaryVec out{gk_values(y.values(), include_tail), {"S1", "S2", "S3"}};
  if (include_tail) out.labels.push_back("S4");
  return out;
}

void block_resample(std::span<const double> y, std::size_t block_len, Rng& rng,
                    std::vector<double>& out) {
  const std::size_t n = y.size();
  out.resize(n);
  std::size_t filled = 0;
  while (filled < n) {
    std::size_t pos = static_cast<std::size_t>(rng.below(n));
    const std::size_t take = std::min(block_len, n - filled);
    for (std::size_t i = 0; i < take; ++i) {
      out[filled++] = y[pos];
      if (++pos == n) pos = 0;
    }
  }
}

Matrix block_bootstrap_cov(const TimeSeries& y, const SummaryFn& summary_fn,
                           const BootstrapSpec& spec, unsigned threads) {
  const std::size_t n = y.size();
  if (spec.block_len < 1 || spec.block_len > n) {
    throw DomainError("block length must lie in [1, n]; got " +
                      std::to_string(spec.block_len) + " with n = " +
                      std::to_string(n));
  }
  if (spec.n_boot < 2) throw DomainError("bootstrap needs n_boot >= 2");

  const Vector first = summary_fn(y.values());
  Matrix reps(static_cast<Eigen::Index>(spec.n_boot), first.size());
  parallel_for(spec.n_boot, threads, [&](std::size_t b) {
    Rng rng(derive_seed(spec.seed, b));
    std::vector<double> pseudo;
    block_resample(y.values(), spec.block_len, rng, pseudo);
    reps.row(static_cast<Eigen::Index>(b)) = summary_fn(pseudo).transpose();
  });
  return sample_cov(reps);
}

}  // namespace bslmis
