#include "bslmis/asymptotics.hpp"

#include "bslmis/linalg.hpp"
#include "bslmis/synthlik.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bslmis {

namespace {

double score_terms(const Vector& G, const Matrix& S, const Matrix& L, const Vector& r,
                   double kappa) {
  const auto llt = cholesky(S, "scaled SL covariance");
  const Vector sr = llt.solve(r);
  const double trace = llt.solve(L).trace();
  return -0.5 * kappa * trace + G.dot(sr) + 0.5 * sr.dot(L * sr);
}

}  // namespace

double ma1_score(double theta, const Vector& s_obs, std::size_t n,
                 TraceScaling scaling) {
  if (!(std::fabs(theta) < 0.999)) {
    throw DomainError("score needs |theta| < 0.999, got " + std::to_string(theta));
  }
  if (s_obs.size() != 2) throw DomainError("MA(1) score needs 2 summaries");
  const double kappa =
      scaling == TraceScaling::kInverseN ? 1.0 / static_cast<double>(n) : 1.0;
  const Vector r = s_obs - ma1_exact_mean(theta).values;
  return score_terms(ma1_mean_gradient(theta), ma1_scaled_cov(theta, n),
                     ma1_scaled_cov_derivative(theta, n), r, kappa);
}

double central_difference(const ScoreFn& f, double x) {
  const double h = 1e-5 * std::max(1.0, std::fabs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

ScoreReport sl_score_ma1(double theta, const Vector& s_obs, std::size_t n,
                         TraceScaling scaling) {
  ScoreReport rep;
  rep.theta = theta;
  rep.score = ma1_score(theta, s_obs, n, scaling);
  rep.hessian = central_difference(
      [&](double t) { return ma1_score(t, s_obs, n, scaling); }, theta);
  return rep;
}

double ma1_limit_score(double theta, const Vector& b0) {
  if (!(std::fabs(theta) < 0.999)) {
    throw DomainError("score needs |theta| < 0.999, got " + std::to_string(theta));
  }
  const Vector r = b0 - ma1_exact_mean(theta).values;
  return score_terms(ma1_mean_gradient(theta), ma1_limit_cov(theta),
                     ma1_limit_cov_derivative(theta), r, 0.0);
}

double ma1_limit_hessian(double theta, const Vector& b0) {
  return central_difference([&](double t) { return ma1_limit_score(t, b0); }, theta);
}

std::size_t RootSet::local_max_count() const {
  return static_cast<std::size_t>(std::count_if(
      roots.begin(), roots.end(), [](const Root& r) { return r.is_local_max; }));
}

RootSet find_roots(const ScoreFn& score_fn, std::span<const double> grid) {
  RootSet out;
  if (grid.size() < 2) throw DomainError("find_roots needs at least 2 grid points");
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = score_fn(grid[i]);

  auto add_root = [&](double x) {
    const double h = central_difference(score_fn, x);
    out.roots.push_back({x, h, h < 0.0});
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (s[i] == 0.0) {
      add_root(grid[i]);
      continue;
    }
    if (i + 1 == grid.size() || s[i + 1] == 0.0) continue;
    if ((s[i] < 0.0) == (s[i + 1] < 0.0)) continue;
    double lo = grid[i];
    double hi = grid[i + 1];
    double flo = s[i];
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval at double resolution
      const double fm = score_fn(mid);
      if (fm == 0.0) break;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    add_root(mid);
  }
  out.no_sign_change = out.roots.empty();
  return out;
}

ShapeCheck local_shape_check(const GridPosterior& post, double root, double window,
                             std::size_t n, double hessian) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < post.size(); ++i) {
    if (std::fabs(post.grid[i] - root) <= window && post.density[i] > 0.0) {
      xs.push_back(post.grid[i] - root);
      ys.push_back(std::log(post.density[i]));
    }
  }
  if (xs.size() < 5) {
    throw InsufficientResolutionError(
        "shape check needs >= 5 grid points within the window, got " +
        std::to_string(xs.size()));
  }
  Matrix X(static_cast<Eigen::Index>(xs.size()), 3);
  Vector y(static_cast<Eigen::Index>(xs.size()));
  // Scale the abscissa to [-1, 1] for a well-conditioned fit.
  const double scale = window > 0.0 ? window : 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = xs[i] / scale;
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = 1.0;
    X(r, 1) = u;
    X(r, 2) = u * u;
    y(r) = ys[i];
  }
  const Vector coef = X.colPivHouseholderQr().solve(y);
  const double curvature = 2.0 * coef(2) / (scale * scale);
  ShapeCheck out;
  out.points = xs.size();
  // log density curvature is about -n / Delta near the mode
  out.delta_hat = -static_cast<double>(n) / curvature;
  out.delta = -1.0 / hessian;
  out.discrepancy = std::fabs(out.delta_hat - out.delta) / std::fabs(out.delta);
  return out;
}

SandwichReport sandwich_variance(const Matrix& G, const Matrix& Sigma, const Matrix& V,
                                 const Matrix& H) {
  if (H.rows() != H.cols() || H.rows() != G.cols() || Sigma.rows() != G.rows() ||
      V.rows() != G.rows()) {
    throw DomainError("dimension mismatch in sandwich_variance");
  }
  const Matrix negH = -0.5 * (H + H.transpose());
  Eigen::LLT<Matrix> llt(negH);
  if (llt.info() != Eigen::Success || min_eigenvalue(negH) <= 0.0) {
    throw NotAMaxError("Hessian is not negative definite");
  }
  const auto ls = cholesky(Sigma, "SL covariance");
  const Matrix sg = ls.solve(G);
  SandwichReport out;
  out.Delta = llt.solve(Matrix::Identity(H.rows(), H.cols()));
  out.Delta = 0.5 * (out.Delta + out.Delta.transpose());
  out.W = sg.transpose() * V * sg;
  out.W = 0.5 * (out.W + out.W.transpose());
  out.sandwich = out.Delta * out.W * out.Delta.transpose();
  out.sandwich = 0.5 * (out.sandwich + out.sandwich.transpose());
  return out;
}

std::vector<HessianScanRow> hessian_scan(const Vector& s_obs, std::size_t n,
                                         std::span<const double> grid) {
  std::vector<HessianScanRow> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ScoreReport r = sl_score_ma1(grid[i], s_obs, n);
    rows[i] = {grid[i], ma1_exact_loglik(grid[i], s_obs, n), r.score, r.hessian, false};
  }
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    rows[i].is_mode = rows[i].loglik > rows[i - 1].loglik &&
                      rows[i].loglik > rows[i + 1].loglik && rows[i].hessian < 0.0;
  }
  return rows;
}

double bvm_weighted_l1(const GridPosterior& post, double center, double delta,
                       std::size_t n) {
  if (!(delta > 0.0)) throw DomainError("BvM check needs delta > 0");
  const double rn = std::sqrt(static_cast<double>(n));
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * delta);
  auto integrand = [&](std::size_t i) {
    const double t = rn * (post.grid[i] - center);
    const double pt = post.density[i] / rn;
    const double phi = norm * std::exp(-0.5 * t * t / delta);
    return std::fabs(t) * std::fabs(pt - phi);
  };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < post.size(); ++i) {
    const double dt = rn * (post.grid[i + 1] - post.grid[i]);
    s += 0.5 * dt * (integrand(i) + integrand(i + 1));
  }
  return s;
}

}  // namespace bslmis
