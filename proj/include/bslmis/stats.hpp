#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bslmis {

double mean_of(std::span<const double> x);
// Sample variance, divisor n - 1.
double variance_of(std::span<const double> x);
double sd_of(std::span<const double> x);
double skewness_of(std::span<const double> x);
double excess_kurtosis_of(std::span<const double> x);
// Type-7 quantile of an unsorted sample.
double quantile_of(std::span<const double> x, double p);

// Monte Carlo standard error of the mean of a correlated sequence by
// non-overlapping batch means.
double batch_means_se(std::span<const double> x, std::size_t batches = 50);

// Equal-tailed interval [q(a/2), q(1 - a/2)] at level 1 - a.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};
Interval equal_tailed_interval(std::span<const double> x, double level);

// Sup distance between the empirical CDF of x and the Exp(mean) CDF.
double ks_distance_exponential(std::span<const double> x, double mean);
// Sup distance between the empirical CDF of x and the uniform CDF on [a, b].
double ks_distance_uniform(std::span<const double> x, double a, double b);

// Gaussian kernel density estimate with Silverman's bandwidth,
// 0.9 min(sd, IQR/1.34) n^{-1/5}, evaluated on `points` equispaced values
// spanning the sample range padded by three bandwidths.
struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};
// Silverman's rule uses bandwidth_n in place of the sample size when it is
// positive; pass an effective sample size for autocorrelated MCMC draws.
KdeCurve kde_silverman(std::span<const double> sample, std::size_t points = 512,
                       double bandwidth_n = 0.0);

// Indices of local maxima of f. A run of equal values counts once (its
// middle index); the first and last entries count when they exceed their
// single neighbour. A constant sequence has no maxima.
std::vector<std::size_t> local_maxima(std::span<const double> f);

// Number of local maxima of the KDE whose height is at least rel_height
// times the global maximum.
std::size_t kde_mode_count(std::span<const double> sample,
                           double rel_height = 0.1, std::size_t points = 512,
                           double bandwidth_n = 0.0);

// Geyer's initial positive sequence estimate; at most x.size().
double effective_sample_size(std::span<const double> x);

}  // namespace bslmis
