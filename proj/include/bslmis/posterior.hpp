#pragma once

#include "bslmis/common.hpp"
#include "bslmis/models.hpp"
#include "bslmis/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bslmis {

// ---- Grid posteriors -------------------------------------------------------

struct GridPosterior {
  std::vector<double> grid;
  std::vector<double> density;     // normalized by the trapezoid rule
  std::vector<double> log_unnorm;  // log prior + log likelihood

  std::size_t size() const { return grid.size(); }
  double mean() const;
  double variance() const;
  // Trapezoid mass on [a, b] (clipped to the grid; linear within cells).
  double mass_between(double a, double b) const;
  // Inverse of the piecewise-quadratic trapezoid CDF.
  double quantile(double p) const;
  std::size_t argmax() const;
};

using ScalarLogFn = std::function<double(double)>;

// Evaluates log_prior + loglik on the grid (-inf allowed) and normalizes with
// max-subtraction. Throws DegeneratePosteriorError when every point is -inf.
GridPosterior grid_posterior(const ScalarLogFn& loglik,
                             const ScalarLogFn& log_prior,
                             std::vector<double> grid, unsigned threads = 1);

std::vector<double> linspace(double lo, double hi, std::size_t count);
// 2001 equispaced points on [-0.999, 0.999].
std::vector<double> ma1_default_grid();

// Local maxima of the density (boundary points included) whose height is at
// least rel_height times the global maximum.
std::vector<std::size_t> posterior_modes(const GridPosterior& post,
                                         double rel_height = 1e-3);
// All local maxima of log_unnorm, without a height filter.
std::vector<std::size_t> argmax_cells(const GridPosterior& post);

// Independent draws from the grid density, linear within each cell.
std::vector<double> sample_grid(const GridPosterior& post, std::size_t count,
                                std::uint64_t seed);

// ---- MCMC ------------------------------------------------------------------

using LogPriorFn = std::function<double(const Vector&)>;

// Everything a BSL sampler needs to evaluate the estimated SL.
struct BslTarget {
  ModelSpec model;
  LogPriorFn log_prior;
  Vector s_obs;
  std::size_t n = 0;  // simulated series length
  std::size_t m = 0;  // simulations per SL estimate
  unsigned threads = 1;
  // When set, the SL covariance is this fixed matrix for every theta and
  // only the summary mean is estimated.
  std::optional<Matrix> fixed_cov;
};

// How Gamma inflates the SL covariance in r-BSL.
//   kDiagonalScale: Sigma + D diag(gamma^2) D with D = diag(sd of each summary),
//     i.e. summary j's sd is scaled by sqrt(1 + gamma_j^2).
//   kSymmetricSqrt: Sigma + S diag(gamma) S with S the symmetric root of Sigma.
enum class GammaForm { kDiagonalScale, kSymmetricSqrt };

GammaForm parse_gamma_form(const std::string& name);  // "diag-scale" | "sym-sqrt"
std::string to_string(GammaForm form);

struct McmcConfig {
  std::size_t n_iter = 0;
  std::size_t burn_in = 0;
  Vector theta0;
  Vector proposal_sd;
  // Full random-walk covariance; when set, proposal_sd is ignored.
  std::optional<Matrix> proposal_cov;
  // Batch adaptation of a global scale toward the [0.234, 0.44] acceptance
  // band, applied during burn-in only.
  bool adapt = true;
  std::size_t adapt_batch = 50;
  // r-BSL only.
  double gamma_prior_mean = 0.5;
  double gamma_proposal_sd = 1.0;  // on log(gamma)
  bool gamma_fixed_zero = false;
  GammaForm gamma_form = GammaForm::kDiagonalScale;
};

struct Chain {
  std::vector<std::string> param_names;
  std::vector<std::string> gamma_names;
  Matrix theta;  // n_iter x d_theta
  Matrix gamma;  // n_iter x d, or 0 columns
  std::vector<double> loglik;
  std::vector<unsigned char> accepted;
  std::size_t n_accepted = 0;
  // NaN for an empty chain.
  double acceptance_rate = 0.0;
  double gamma_acceptance_rate = 0.0;
  std::uint64_t seed = 0;
  // Proposal scale after each burn-in batch, then the frozen value.
  std::vector<double> proposal_scale;
  std::size_t singular_proposals = 0;

  std::size_t size() const { return loglik.size(); }
  bool has_gamma() const { return gamma.cols() > 0; }
  std::vector<double> column(std::size_t j) const;
  std::vector<double> gamma_column(std::size_t j) const;
};

// Pseudo-marginal random-walk MH on the estimated SL. The current state's
// SL estimate is retained; proposals outside the prior support or with a
// singular SL covariance are rejected.
Chain bsl_rwmh(const BslTarget& target, const McmcConfig& config,
               std::uint64_t seed);

// Robust BSL: Metropolis-within-Gibbs over (theta, Gamma) with the SL
// covariance inflated as config.gamma_form says and independent exponential
// priors on gamma_j.
Chain rbsl_mh(const BslTarget& target, const McmcConfig& config,
              std::uint64_t seed);

// Random-walk MH on a deterministic log target (prior included).
Chain rwmh(const std::function<double(const Vector&)>& log_target,
           std::vector<std::string> param_names, const McmcConfig& config,
           std::uint64_t seed);

// The matrix D of GammaForm for a given SL covariance.
Matrix rbsl_scale(const Matrix& cov, GammaForm form);
// Covariance-inflated SL log-density used by rbsl_mh; scale = rbsl_scale(cov, form).
double rbsl_logpdf(const Vector& mean, const Matrix& scale, const Matrix& cov,
                   const Vector& gamma, const Vector& s, GammaForm form);

// ---- Rejection ABC ---------------------------------------------------------

struct AbcResult {
  Matrix draws;  // accepted parameters, closest first
  std::vector<double> distances;
  double threshold = 0.0;
};

using PriorSampler = std::function<Vector(Rng&)>;

// Keeps the ceil(keep_frac * n_sims) prior draws whose simulated summaries
// are closest to s_obs in Euclidean distance.
AbcResult rejection_abc(const ModelSpec& model, const PriorSampler& prior,
                        const Vector& s_obs, std::size_t n, std::size_t n_sims,
                        double keep_frac, std::uint64_t seed,
                        unsigned threads = 1);

}  // namespace bslmis
