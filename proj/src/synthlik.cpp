#include "bslmis/synthlik.hpp"

#include "bslmis/linalg.hpp"
#include "bslmis/parallel.hpp"
#include "bslmis/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bslmis {

SynthLikEstimate estimate_sl(const ModelSpec& model, const Vector& theta,
                             std::size_t m, std::size_t n, std::uint64_t seed,
                             unsigned threads) {
  const std::size_t d = model.summary_dim();
  if (m <= d) {
    throw SingularityError("m = " + std::to_string(m) +
                               " simulations cannot give a full-rank covariance"
                               " in dimension " + std::to_string(d),
                           theta, m);
  }
  Matrix sims(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  parallel_for(m, threads, [&](std::size_t i) {
    const TimeSeries z = model.simulate(theta, n, derive_seed(seed, i));
    sims.row(static_cast<Eigen::Index>(i)) = model.summarize(z.values()).transpose();
  });

  SynthLikEstimate est;
  est.m = m;
  est.mean.values = sims.colwise().mean().transpose();
  est.mean.labels = model.summary_labels;
  est.cov = sample_cov(sims);

  Eigen::SelfAdjointEigenSolver<Matrix> es(est.cov, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= kEigenTolerance * lmax) {
    throw SingularityError("synthetic-likelihood covariance is singular", theta, m);
  }
  return est;
}

Vector estimate_sl_mean(const ModelSpec& model, const Vector& theta, std::size_t m,
                        std::size_t n, std::uint64_t seed, unsigned threads) {
  if (m == 0) throw DomainError("estimate_sl_mean needs m >= 1");
  const auto d = static_cast<Eigen::Index>(model.summary_dim());
  Matrix sims(static_cast<Eigen::Index>(m), d);
  parallel_for(m, threads, [&](std::size_t i) {
    const TimeSeries z = model.simulate(theta, n, derive_seed(seed, i));
    sims.row(static_cast<Eigen::Index>(i)) = model.summarize(z.values()).transpose();
  });
  return sims.colwise().mean().transpose();
}

double sl_logpdf(const Vector& mean, const Matrix& cov, const Vector& s) {
  if (mean.size() != s.size() || cov.rows() != s.size()) {
    throw DomainError("dimension mismatch in sl_logpdf");
  }
  const auto llt = cholesky(cov, "SL covariance");
  const Vector r = llt.matrixL().solve(s - mean);
  const double d = static_cast<double>(s.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_spd(llt) -
         0.5 * r.squaredNorm();
}

double sl_logpdf(const SynthLikEstimate& est, const Vector& s) {
  return sl_logpdf(est.mean.values, est.cov, s);
}

namespace {

void check_theta(double theta) {
  if (!(theta > -1.0 && theta < 1.0)) {
    throw DomainError("MA(1) theta must lie in (-1, 1), got " +
                      std::to_string(theta));
  }
}

}  // namespace

SummaryVec ma1_exact_mean(double theta) {
  check_theta(theta);
  Vector b(2);
  b << 1.0 + theta * theta, theta;
  return {b, {"S0", "S1"}};
}

Vector ma1_mean_gradient(double theta) {
  Vector g(2);
  g << 2.0 * theta, 1.0;
  return g;
}

Matrix ma1_scaled_cov(double theta, std::size_t n) {
  check_theta(theta);
  if (n < 2) throw DomainError("MA(1) covariance needs n >= 2");
  const double t2 = theta * theta;
  const double a = 1.0 + t2;
  const double nn = static_cast<double>(n);
  const double r1 = (nn - 1.0) / nn;
  const double r2 = (nn - 2.0) / nn;
  Matrix s(2, 2);
  s(0, 0) = 2.0 * a * a + 4.0 * t2 * r1;
  s(1, 1) = r1 * (a * a + t2) + 2.0 * r2 * t2;
  s(0, 1) = s(1, 0) = 4.0 * theta * a * r1;
  return s;
}

Matrix ma1_scaled_cov_derivative(double theta, std::size_t n) {
  check_theta(theta);
  if (n < 2) throw DomainError("MA(1) covariance needs n >= 2");
  const double a = 1.0 + theta * theta;
  const double nn = static_cast<double>(n);
  const double r1 = (nn - 1.0) / nn;
  const double r2 = (nn - 2.0) / nn;
  Matrix l(2, 2);
  l(0, 0) = 8.0 * theta * a + 8.0 * theta * r1;
  l(1, 1) = r1 * (4.0 * theta * a + 2.0 * theta) + 4.0 * r2 * theta;
  l(0, 1) = l(1, 0) = 4.0 * r1 * (1.0 + 3.0 * theta * theta);
  return l;
}

Matrix ma1_limit_cov(double theta) {
  check_theta(theta);
  const double t2 = theta * theta;
  const double a = 1.0 + t2;
  Matrix s(2, 2);
  s(0, 0) = 2.0 * a * a + 4.0 * t2;
  s(1, 1) = a * a + 3.0 * t2;
  s(0, 1) = s(1, 0) = 4.0 * theta * a;
  return s;
}

Matrix ma1_limit_cov_derivative(double theta) {
  check_theta(theta);
  const double a = 1.0 + theta * theta;
  Matrix l(2, 2);
  l(0, 0) = 8.0 * theta * a + 8.0 * theta;
  l(1, 1) = 4.0 * theta * a + 6.0 * theta;
  l(0, 1) = l(1, 0) = 4.0 * (1.0 + 3.0 * theta * theta);
  return l;
}

Matrix ma1_exact_cov(double theta, std::size_t n) {
  Matrix s = ma1_scaled_cov(theta, n) / static_cast<double>(n);
  if (!(s(0, 0) > 0.0) || s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1) <= 0.0) {
    throw DomainError("leading-order MA(1) covariance is not positive-definite"
                      " at theta = " + std::to_string(theta) +
                      ", n = " + std::to_string(n));
  }
  return s;
}

double ma1_exact_loglik(double theta, const Vector& s_obs, std::size_t n) {
  if (!(theta > -1.0 && theta < 1.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return sl_logpdf(ma1_exact_mean(theta).values, ma1_exact_cov(theta, n), s_obs);
}

double kl_gaussian_sl(const LimitTarget& target, const Vector& b,
                      const Matrix& Sigma) {
  const Vector& b0 = target.b0.values;
  if (b.size() != b0.size() || Sigma.rows() != b.size() ||
      target.V.rows() != b.size()) {
    throw DomainError("dimension mismatch in kl_gaussian_sl");
  }
  const auto ls = cholesky(Sigma, "SL covariance");
  const auto lv = cholesky(target.V, "limit variance V");
  const double d = static_cast<double>(b.size());
  const double trace = ls.solve(target.V).trace();
  const Vector r = ls.matrixL().solve(b - b0);
  const double kl = 0.5 * (log_det_spd(ls) - log_det_spd(lv)) + 0.5 * trace +
                    0.5 * r.squaredNorm() - 0.5 * d;
  return std::max(kl, 0.0);
}

namespace {

double misspec_quadratic(const MeanFn& mean_fn, const CovFn& cov_fn,
                         const Vector& b0, double n, double theta) {
  const Vector diff = mean_fn(theta) - b0;
  const auto llt = cholesky(n * cov_fn(theta), "n * Sigma_n");
  return diff.dot(llt.solve(diff));
}

}  // namespace

MisspecIndex misspec_index(const MeanFn& mean_fn, const CovFn& cov_fn,
                           const Vector& b0, std::size_t n,
                           std::span<const double> theta_grid) {
  if (theta_grid.empty()) throw DomainError("misspec_index needs a non-empty grid");
  const double nn = static_cast<double>(n);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    const double v = misspec_quadratic(mean_fn, cov_fn, b0, nn, theta_grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  MisspecIndex out{best_val, theta_grid[best]};
  if (theta_grid.size() < 2) return out;

  double lo = theta_grid[best == 0 ? 0 : best - 1];
  double hi = theta_grid[best + 1 == theta_grid.size() ? best : best + 1];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = misspec_quadratic(mean_fn, cov_fn, b0, nn, x1);
  double f2 = misspec_quadratic(mean_fn, cov_fn, b0, nn, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(lo)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = misspec_quadratic(mean_fn, cov_fn, b0, nn, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = misspec_quadratic(mean_fn, cov_fn, b0, nn, x2);
    }
  }
  const double xm = 0.5 * (lo + hi);
  const double fm = misspec_quadratic(mean_fn, cov_fn, b0, nn, xm);
  if (fm < out.inf_value) out = {fm, xm};
  return out;
}

double temper_logpdf(double logpdf_value, double alpha) {
  if (!(alpha >= 0.0)) {
    throw DomainError("tempering exponent must be >= 0, got " +
                      std::to_string(alpha));
  }
  if (alpha == 0.0) return 0.0;
  return alpha * logpdf_value;
}

Matrix estimate_mean_gradient(const ModelSpec& model, const Vector& theta, std::size_t m,
                              std::size_t n, std::uint64_t seed, unsigned threads) {
  const auto p = theta.size();
  Matrix G(static_cast<Eigen::Index>(model.summary_dim()), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = 1e-4 * std::max(1.0, std::abs(theta(j)));
    Vector hi = theta;
    Vector lo = theta;
    hi(j) += h;
    lo(j) -= h;
    double span = 2.0 * h;
    if (!model.in_support(hi)) {
      hi = theta;
      span = h;
    }
    if (!model.in_support(lo)) {
      lo = theta;
      span = hi == theta ? 0.0 : span - h;
    }
    if (span <= 0.0) throw DomainError("no room for a finite difference inside the support");
    G.col(j) = (estimate_sl_mean(model, hi, m, n, seed, threads) -
                estimate_sl_mean(model, lo, m, n, seed, threads)) /
               span;
  }
  return G;
}

SlFit fit_sl_gauss_newton(const ModelSpec& model, const Vector& s_obs, const Vector& theta0,
                          std::size_t m, std::size_t n, std::uint64_t seed,
                          std::size_t max_iter, unsigned threads) {
  if (!model.in_support(theta0)) throw DomainError("Gauss-Newton start outside the support");
  auto objective = [&](const Vector& th, const Eigen::LLT<Matrix>& w) {
    const Vector r = estimate_sl_mean(model, th, m, n, seed, threads) - s_obs;
    return r.dot(w.solve(r));
  };
  SlFit fit;
  fit.theta = theta0;
  for (fit.iterations = 0; fit.iterations < max_iter; ++fit.iterations) {
    const SynthLikEstimate est = estimate_sl(model, fit.theta, m, n, seed, threads);
    const auto w = cholesky(est.cov, "SL covariance");
    const Matrix G = estimate_mean_gradient(model, fit.theta, m, n, seed, threads);
    const Vector r = est.mean.values - s_obs;
    const double q0 = r.dot(w.solve(r));
    const Matrix WG = w.solve(G);
    const Vector step = -(G.transpose() * WG).ldlt().solve(WG.transpose() * r);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      const Vector cand = fit.theta + t * step;
      if (!model.in_support(cand)) continue;
      if (objective(cand, w) <= q0) {
        fit.theta = cand;
        moved = true;
        break;
      }
    }
    if (!moved || (t * step).norm() < 1e-8 * (1.0 + fit.theta.norm())) break;
  }
  const SynthLikEstimate est = estimate_sl(model, fit.theta, m, n, seed, threads);
  const auto w = cholesky(est.cov, "SL covariance");
  fit.mean = est.mean.values;
  fit.cov = est.cov;
  fit.gradient = estimate_mean_gradient(model, fit.theta, m, n, seed, threads);
  const Vector r = fit.mean - s_obs;
  fit.objective = r.dot(w.solve(r));
  const Matrix info = fit.gradient.transpose() * w.solve(fit.gradient);
  fit.laplace_cov = info.inverse();
  fit.laplace_cov = 0.5 * (fit.laplace_cov + fit.laplace_cov.transpose());
  return fit;
}

}  // namespace bslmis
