#include "bslmis/stats.hpp"

#include "bslmis/common.hpp"
#include "bslmis/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bslmis {

double mean_of(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance needs at least 2 values");
  const double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size() - 1);
}

double sd_of(std::span<const double> x) { return std::sqrt(variance_of(x)); }

namespace {

double central_moment(std::span<const double> x, double mu, int k) {
  double s = 0.0;
  for (double v : x) s += std::pow(v - mu, k);
  return s / static_cast<double>(x.size());
}

}  // namespace

double skewness_of(std::span<const double> x) {
  const double mu = mean_of(x);
  const double m2 = central_moment(x, mu, 2);
  if (!(m2 > 0.0)) return 0.0;
  return central_moment(x, mu, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis_of(std::span<const double> x) {
  const double mu = mean_of(x);
  const double m2 = central_moment(x, mu, 2);
  if (!(m2 > 0.0)) return 0.0;
  return central_moment(x, mu, 4) / (m2 * m2) - 3.0;
}

double quantile_of(std::span<const double> x, double p) {
  const double probs[] = {p};
  return quantiles_type7(x, probs)[0];
}

double batch_means_se(std::span<const double> x, std::size_t batches) {
  if (batches < 2 || x.size() < 2 * batches) {
    throw DomainError("batch means need at least two draws per batch");
  }
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean_of(x.subspan(b * len, len));
  return std::sqrt(variance_of(means) / static_cast<double>(batches));
}

Interval equal_tailed_interval(std::span<const double> x, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("interval level must lie in (0, 1)");
  }
  const double a = 0.5 * (1.0 - level);
  const double probs[] = {a, 1.0 - a};
  const auto q = quantiles_type7(x, probs);
  return {q[0], q[1]};
}

double ks_distance_exponential(std::span<const double> x, double mean) {
  if (x.empty()) throw DomainError("KS distance of an empty sample");
  if (!(mean > 0.0)) throw DomainError("exponential mean must be positive");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = s[i] <= 0.0 ? 0.0 : 1.0 - std::exp(-s[i] / mean);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance_uniform(std::span<const double> x, double a, double b) {
  if (x.empty()) throw DomainError("KS distance of an empty sample");
  if (!(b > a)) throw DomainError("uniform support must have b > a");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = std::clamp((s[i] - a) / (b - a), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  return d;
}

KdeCurve kde_silverman(std::span<const double> sample, std::size_t points,
                       double bandwidth_n) {
  if (sample.size() < 2) throw DomainError("KDE needs at least 2 draws");
  if (points < 3) throw DomainError("KDE needs at least 3 evaluation points");
  const double sd = sd_of(sample);
  const double probs[] = {0.25, 0.75};
  const auto q = quantiles_type7(sample, probs);
  double spread = std::min(sd, (q[1] - q[0]) / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw DomainError("KDE of a constant sample");
  const double n = static_cast<double>(sample.size());
  KdeCurve out;
  out.bandwidth = 0.9 * spread * std::pow(bandwidth_n > 0.0 ? bandwidth_n : n, -0.2);

  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *lo_it - 3.0 * out.bandwidth;
  const double hi = *hi_it + 3.0 * out.bandwidth;

  // Bin the draws on a fine grid first; the kernel sum then costs
  // O(bins * points) instead of O(draws * points).
  const std::size_t bins = 4 * points;
  const double bw = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : sample) {
    auto b = static_cast<std::size_t>((v - lo) / bw);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (n * out.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  out.x.resize(points);
  out.density.assign(points, 0.0);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    out.x[i] = lo + step * static_cast<double>(i);
    double s = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      if (counts[b] == 0.0) continue;
      const double c = lo + (static_cast<double>(b) + 0.5) * bw;
      const double u = (out.x[i] - c) / out.bandwidth;
      s += counts[b] * std::exp(-0.5 * u * u);
    }
    out.density[i] = s * norm;
  }
  return out;
}

std::vector<std::size_t> local_maxima(std::span<const double> f) {
  // Collapse runs of equal values, then keep runs higher than both
  // neighbouring runs; endpoints only need to beat their one neighbour.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == 0 || f[i] != f[i - 1]) starts.push_back(i);
  }
  std::vector<std::size_t> out;
  const std::size_t runs = starts.size();
  for (std::size_t r = 0; r < runs; ++r) {
    const double v = f[starts[r]];
    const bool left = r == 0 || f[starts[r - 1]] < v;
    const bool right = r + 1 == runs || f[starts[r + 1]] < v;
    if (left && right && runs > 1) {
      const std::size_t last = r + 1 == runs ? f.size() - 1 : starts[r + 1] - 1;
      out.push_back((starts[r] + last) / 2);
    }
  }
  return out;
}

std::size_t kde_mode_count(std::span<const double> sample, double rel_height,
                           std::size_t points, double bandwidth_n) {
  const KdeCurve k = kde_silverman(sample, points, bandwidth_n);
  const double top = *std::max_element(k.density.begin(), k.density.end());
  std::size_t modes = 0;
  for (std::size_t i : local_maxima(k.density)) {
    if (k.density[i] >= rel_height * top) ++modes;
  }
  return modes;
}

double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) throw DomainError("ESS needs at least 4 draws");
  const double m = mean_of(x);
  auto acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - m) * (x[i + lag] - m);
    return s / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  // Sum autocorrelation pairs rho(2k) + rho(2k+1) while they stay positive.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (acov(2 * k) + acov(2 * k + 1)) / c0;
    if (!(pair > 0.0)) break;
    tau += 2.0 * pair;
  }
  return std::min(static_cast<double>(n), static_cast<double>(n) / std::max(tau, 1e-12));
}

}  // namespace bslmis
