#include "bslmis/adjust.hpp"

#include "bslmis/linalg.hpp"

#include <cmath>
#include <limits>

namespace bslmis {

Matrix default_naive_cov(std::size_t d, std::size_t n) {
  if (n == 0) throw DomainError("naive covariance needs n >= 1");
  const auto dd = static_cast<Eigen::Index>(d);
  return Matrix::Identity(dd, dd) / static_cast<double>(n);
}

GridPosterior naive_bsl_grid(const MeanFn& mean_fn, const ScalarLogFn& log_prior,
                             const Vector& s_obs, const Matrix& Delta_n,
                             std::vector<double> grid, unsigned threads) {
  Eigen::LLT<Matrix> llt(Delta_n);
  if (Delta_n.rows() != s_obs.size() || llt.info() != Eigen::Success ||
      min_eigenvalue(Delta_n) <= 0.0) {
    throw DomainError("naive SL covariance must be positive definite and d x d");
  }
  auto loglik = [&](double theta) {
    const Vector r = mean_fn(theta) - s_obs;
    return -0.5 * r.dot(llt.solve(r));
  };
  // mean_fn may reject theta outside its domain; the prior decides support.
  return grid_posterior(loglik, log_prior, std::move(grid), threads);
}

Matrix estimate_W(const TimeSeries& y, const SummaryFn& summary_fn,
                  const Vector& theta_bar, const MeanGradientFn& mean_gradient,
                  const Matrix& Delta_n, const BootstrapSpec& spec, unsigned threads) {
  const double n = static_cast<double>(y.size());
  const Matrix V = n * block_bootstrap_cov(y, summary_fn, spec, threads);
  const Matrix G = mean_gradient(theta_bar);
  if (G.rows() != V.rows() || Delta_n.rows() != V.rows()) {
    throw DomainError("dimension mismatch in estimate_W");
  }
  const auto llt = cholesky(n * Delta_n, "n * Delta_n");
  const Matrix sg = llt.solve(G);
  Matrix W = sg.transpose() * V * sg;
  return 0.5 * (W + W.transpose());
}

AdjustedDraws adjust_draws(const Matrix& draws, const Vector& theta_bar,
                           const Matrix& Omega, const Matrix& W_hat,
                           const AdjustOptions& options) {
  const Eigen::Index p = theta_bar.size();
  if (draws.cols() != p || Omega.rows() != p || W_hat.rows() != p) {
    throw DomainError("dimension mismatch in adjust_draws");
  }
  if (!(options.n_scale > 0.0)) throw DomainError("n_scale must be positive");
  Eigen::LLT<Matrix> llt(Omega);
  if (llt.info() != Eigen::Success) {
    throw DomainError("posterior covariance Omega is not positive definite");
  }
  const Matrix omega_inv_sqrt = sym_inv_sqrt(Omega);
  const Matrix w_part = options.literal ? Matrix(0.5 * (W_hat + W_hat.transpose()))
                                        : sym_sqrt(W_hat);
  if (options.literal && min_eigenvalue(W_hat) < -kEigenTolerance *
                                                      std::max(1.0, W_hat.norm())) {
    throw DomainError("W_hat has a negative eigenvalue");
  }
  AdjustedDraws out;
  out.A = std::sqrt(options.n_scale) * Omega * w_part * omega_inv_sqrt;
  out.draws = ((draws.rowwise() - theta_bar.transpose()) * out.A.transpose()).rowwise() +
              theta_bar.transpose();
  return out;
}

AdjustmentReport run_adjusted_pipeline(const TimeSeries& y, const AdjustConfig& cfg) {
  static constexpr std::size_t lags[] = {0, 1};
  const std::size_t n = y.size();
  const Vector s_obs = autocov_values(y.values(), lags);
  const Matrix Delta_n = default_naive_cov(2, n);
  auto mean_fn = [](double t) { return ma1_exact_mean(t).values; };
  auto flat = [](double t) {
    return (t > -1.0 && t < 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  const GridPosterior post = naive_bsl_grid(mean_fn, flat, s_obs, Delta_n, cfg.grid);

  AdjustmentReport rep;
  rep.theta_bar = Vector::Constant(1, post.mean());
  rep.Omega = Matrix::Constant(1, 1, post.variance());
  const std::vector<double> draws = sample_grid(post, cfg.n_draws, cfg.draw_seed);
  rep.naive_draws = Eigen::Map<const Vector>(draws.data(),
                                             static_cast<Eigen::Index>(draws.size()));

  const SummaryFn summary = [](std::span<const double> z) {
    return autocov_values(z, lags);
  };
  const MeanGradientFn grad = [](const Vector& th) {
    return Matrix(ma1_mean_gradient(th(0)));
  };
  rep.W_hat = estimate_W(y, summary, rep.theta_bar, grad, Delta_n, cfg.bootstrap,
                         cfg.threads);

  AdjustOptions opt;
  opt.literal = cfg.literal;
  opt.n_scale = cfg.literal ? 1.0 : static_cast<double>(n);
  const AdjustedDraws adj =
      adjust_draws(rep.naive_draws, rep.theta_bar, rep.Omega, rep.W_hat, opt);
  rep.A = adj.A;
  rep.adjusted_draws = adj.draws;

  const std::span<const double> nd(rep.naive_draws.data(),
                                   static_cast<std::size_t>(rep.naive_draws.rows()));
  const std::span<const double> ad(rep.adjusted_draws.data(),
                                   static_cast<std::size_t>(rep.adjusted_draws.rows()));
  rep.naive_mean = mean_of(nd);
  rep.naive_var = variance_of(nd);
  rep.adjusted_mean = mean_of(ad);
  rep.adjusted_var = variance_of(ad);
  rep.naive_interval = equal_tailed_interval(nd, cfg.level);
  rep.adjusted_interval = equal_tailed_interval(ad, cfg.level);
  return rep;
}

}  // namespace bslmis
