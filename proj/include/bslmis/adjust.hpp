#pragma once

#include "bslmis/common.hpp"
#include "bslmis/models.hpp"
#include "bslmis/posterior.hpp"
#include "bslmis/stats.hpp"
#include "bslmis/summaries.hpp"
#include "bslmis/synthlik.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bslmis {

// Naive BSL on a grid: the SL covariance is the fixed matrix Delta_n, so
// ln g = -(1/2)(b(theta) - s)' Delta_n^{-1} (b(theta) - s) up to a constant.
// Throws DomainError when Delta_n is not positive definite.
GridPosterior naive_bsl_grid(const MeanFn& mean_fn, const ScalarLogFn& log_prior,
                             const Vector& s_obs, const Matrix& Delta_n,
                             std::vector<double> grid, unsigned threads = 1);

// Delta_n = I / n.
Matrix default_naive_cov(std::size_t d, std::size_t n);

using MeanGradientFn = std::function<Matrix(const Vector&)>;

// W_hat = G' Sigma^{-1} V Sigma^{-1} G with Sigma = n Delta_n,
// V = n block_bootstrap_cov(y) and G = mean_gradient(theta_bar) (d x p).
Matrix estimate_W(const TimeSeries& y, const SummaryFn& summary_fn,
                  const Vector& theta_bar, const MeanGradientFn& mean_gradient,
                  const Matrix& Delta_n, const BootstrapSpec& spec,
                  unsigned threads = 1);

struct AdjustOptions {
  // Multiplies the sandwich transform by sqrt(n_scale). With the naive
  // posterior covariance Omega ~ Delta / n and W_hat ~ W, n_scale = n makes
  // cov(adjusted) = n Omega W Omega ~ Delta W Delta / n.
  double n_scale = 1.0;
  // Use A = Omega W Omega^{-1/2} instead of A = Omega W^{1/2} Omega^{-1/2}.
  bool literal = false;
};

struct AdjustedDraws {
  Matrix draws;  // rows are draws
  Matrix A;
};

// theta_hat_j = theta_bar + A (theta_j - theta_bar).
AdjustedDraws adjust_draws(const Matrix& draws, const Vector& theta_bar,
                           const Matrix& Omega, const Matrix& W_hat,
                           const AdjustOptions& options = {});

struct AdjustmentReport {
  Vector theta_bar;
  Matrix Omega;
  Matrix W_hat;
  Matrix A;
  Matrix naive_draws;
  Matrix adjusted_draws;
  // Draw-based summaries of the first parameter.
  double naive_mean = 0.0;
  double naive_var = 0.0;
  double adjusted_mean = 0.0;
  double adjusted_var = 0.0;
  Interval naive_interval;
  Interval adjusted_interval;
};

struct AdjustConfig {
  std::vector<double> grid = ma1_default_grid();
  std::size_t n_draws = 10000;
  BootstrapSpec bootstrap;
  double level = 0.95;
  bool literal = false;
  std::uint64_t draw_seed = 0;
  unsigned threads = 1;
};

// Two-step adjusted BSL for the MA(1) model with autocovariance summaries
// (S_0, S_1): naive grid posterior with Delta_n = I/n and flat prior on
// (-1, 1), n_draws draws from it, W_hat from the block bootstrap of y, and
// the n-scaled sandwich transform.
AdjustmentReport run_adjusted_pipeline(const TimeSeries& y, const AdjustConfig& config);

}  // namespace bslmis
