#pragma once

#include "bslmis/common.hpp"
#include "bslmis/models.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace bslmis {

// Sample moments of m simulated summary vectors at one theta.
struct SynthLikEstimate {
  SummaryVec mean;
  Matrix cov;
  std::size_t m = 0;
};

// Simulates m datasets of length n at theta (dataset i uses
// derive_seed(seed, i), so equal seeds give common random numbers across
// theta) and returns the sample mean and the divisor-(m-1) covariance.
// Throws SingularityError when m <= d or the smallest eigenvalue of the
// covariance is below kEigenTolerance times the largest.
SynthLikEstimate estimate_sl(const ModelSpec& model, const Vector& theta,
                             std::size_t m, std::size_t n, std::uint64_t seed,
                             unsigned threads = 1);

// Mean of m simulated summary vectors, with the same seeding as estimate_sl.
Vector estimate_sl_mean(const ModelSpec& model, const Vector& theta, std::size_t m,
                        std::size_t n, std::uint64_t seed, unsigned threads = 1);

// Gaussian log-density N(s; mean, cov) through a Cholesky factor.
double sl_logpdf(const Vector& mean, const Matrix& cov, const Vector& s);
double sl_logpdf(const SynthLikEstimate& est, const Vector& s);

// ---- MA(1) closed forms ---------------------------------------------------
// Summary mean b(theta) = (1 + theta^2, theta).
SummaryVec ma1_exact_mean(double theta);
// db/dtheta = (2 theta, 1).
Vector ma1_mean_gradient(double theta);

// Leading-order Var(S_n | theta) for S = (S_0, S_1). Throws DomainError when
// the result is not positive definite (n too small for the leading terms).
Matrix ma1_exact_cov(double theta, std::size_t n);
// n * Var(S_n | theta) and its theta-derivative.
Matrix ma1_scaled_cov(double theta, std::size_t n);
Matrix ma1_scaled_cov_derivative(double theta, std::size_t n);
// lim_n n * Var(S_n | theta) and its theta-derivative.
Matrix ma1_limit_cov(double theta);
Matrix ma1_limit_cov_derivative(double theta);

// ln g_n(s | theta) = ln N(s; b(theta), Sigma_n(theta)); -inf outside (-1, 1).
double ma1_exact_loglik(double theta, const Vector& s_obs, std::size_t n);

// ---- KL decomposition and the misspecification index -----------------------
struct LimitTarget {
  SummaryVec b0;
  Matrix V;
};

// KL divergence from N(b0, V) to N(b, Sigma).
double kl_gaussian_sl(const LimitTarget& target, const Vector& b,
                      const Matrix& Sigma);

struct MisspecIndex {
  double inf_value = 0.0;
  double argmin = 0.0;
};

using MeanFn = std::function<Vector(double)>;
using CovFn = std::function<Matrix(double)>;

// inf over theta of (b(theta) - b0)' [n Sigma_n(theta)]^{-1} (b(theta) - b0),
// where cov_fn returns Sigma_n. The grid minimum is refined by golden-section
// search over the two adjacent cells.
MisspecIndex misspec_index(const MeanFn& mean_fn, const CovFn& cov_fn,
                           const Vector& b0, std::size_t n,
                           std::span<const double> theta_grid);

// d x p central differences of the simulated summary mean, all evaluations
// sharing seed. Steps are one-sided at the edge of the support.
Matrix estimate_mean_gradient(const ModelSpec& model, const Vector& theta, std::size_t m,
                              std::size_t n, std::uint64_t seed, unsigned threads = 1);

struct SlFit {
  Vector theta;
  Vector mean;
  Matrix cov;
  Matrix gradient;     // d x p
  Matrix laplace_cov;  // (G' Sigma^{-1} G)^{-1}
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Gauss-Newton minimization of (b(theta) - s)' Sigma^{-1} (b(theta) - s) with
// b, Sigma and the gradient estimated from m simulations that share seed
// (common random numbers keep the objective smooth in theta). The weight
// Sigma is refreshed at each iterate; steps are halved until they stay in the
// model support and do not increase the objective.
SlFit fit_sl_gauss_newton(const ModelSpec& model, const Vector& s_obs, const Vector& theta0,
                          std::size_t m, std::size_t n, std::uint64_t seed,
                          std::size_t max_iter = 30, unsigned threads = 1);

// alpha * logpdf_value (exact-SL tempering); alpha = 0 gives 0 even for -inf.
double temper_logpdf(double logpdf_value, double alpha);

}  // namespace bslmis
