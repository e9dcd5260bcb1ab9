#pragma once

#include "bslmis/adjust.hpp"
#include "bslmis/common.hpp"
#include "bslmis/models.hpp"
#include "bslmis/posterior.hpp"
#include "bslmis/summaries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bslmis {

// log(sd_A / sd_S) + (sd_S^2 + (mu_S - mu_A)^2) / (2 sd_A^2) - 1/2.
double kldn(double mu_S, double sd_S, double mu_A, double sd_A);

// Tail probability of an observed value within a predictive sample, with a
// +1 correction on both sides: min(lower, upper, 0.5).
double tail_probability(std::span<const double> predictive, double observed);

struct PpcSummary {
  std::string label;
  double observed = 0.0;
  std::vector<double> predictive;
  double tail = 0.0;
};

struct PpcReport {
  std::vector<PpcSummary> summaries;
};

// Replicate r draws a chain row uniformly and simulates one dataset from it
// with seeds derived from (seed, r).
PpcReport posterior_predictive_check(const Chain& chain, const ModelSpec& model,
                                     const Vector& s_obs, std::size_t n,
                                     std::size_t n_rep, std::uint64_t seed,
                                     unsigned threads = 1);

struct BootVarSummary {
  std::string label;
  double observed = 0.0;             // bootstrap variance on the data
  std::vector<double> predictive;    // bootstrap variances on replicates
  double tail = 0.0;
  bool observed_below = false;       // observed is below the predictive median
  bool flagged = false;              // tail < alpha
};

struct BootVarReport {
  std::vector<BootVarSummary> summaries;
  double alpha = 0.01;
};

BootVarReport bootstrap_variance_check(const TimeSeries& y, const Chain& chain,
                                       const ModelSpec& model, const BootstrapSpec& spec,
                                       std::size_t n_rep, std::uint64_t seed,
                                       double alpha = 0.01, unsigned threads = 1);

struct GammaDeparture {
  std::size_t index = 0;
  std::string label;
  double ks = 0.0;
};

// KS distance of each gamma_j marginal from its Exp(prior_mean) prior,
// sorted by decreasing distance.
std::vector<GammaDeparture> gamma_departure(const Chain& chain, double prior_mean);

struct CoverageConfig {
  std::vector<std::size_t> ns = {100, 1000};
  std::size_t replications = 100;
  SvParams sv;
  double pseudo_true = 0.0;
  AdjustConfig adjust;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct CoverageReplication {
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t data_seed = 0;
  double naive_mean = 0.0;
  double naive_var = 0.0;
  bool naive_covers = false;
  double adjusted_mean = 0.0;
  double adjusted_var = 0.0;
  bool adjusted_covers = false;
  std::string error;  // non-empty when the replication failed
};

struct CoverageCell {
  std::string method;  // "a-BSL" or "n-BSL"
  std::size_t n = 0;
  double mean_x1e3 = 0.0;  // average posterior mean times 1e3
  double var = 0.0;        // average posterior variance
  double coverage = 0.0;
  std::size_t ok = 0;      // replications that completed
};

struct CoverageResult {
  std::vector<CoverageReplication> replications;
  std::vector<CoverageCell> cells;
  // Per n: fraction of replications with adjusted var < naive var.
  std::vector<std::pair<std::size_t, double>> var_order_fraction;
  std::size_t failures = 0;
};

// Repeated SV data sets, each fitted with the naive and adjusted MA(1) BSL
// pipelines; tallies equal-tailed coverage of the pseudo-true value.
CoverageResult coverage_experiment(const CoverageConfig& config);

}  // namespace bslmis
