#pragma once

#include "bslmis/common.hpp"
#include "bslmis/posterior.hpp"

#include <functional>
#include <span>
#include <vector>

namespace bslmis {

// Scaling of the log-determinant term in the score. kInverseN is the exact
// derivative of (1/n) ln g_n; kOne keeps that term at full weight.
enum class TraceScaling { kInverseN, kOne };

struct ScoreReport {
  double theta = 0.0;
  double score = 0.0;
  double hessian = 0.0;
};

// M_n(theta) = (1/n) d/dtheta ln g_n(s | theta) for the exact MA(1) SL:
//   -(kappa/2) tr(S^{-1} L) + G' S^{-1} (s - b) + (1/2) (s - b)' S^{-1} L S^{-1} (s - b)
// with S = n Sigma_n(theta), L = dS/dtheta, G = db/dtheta. The Hessian is a
// central difference of the score with step 1e-5 max(1, |theta|).
// Throws DomainError for |theta| >= 0.999.
double ma1_score(double theta, const Vector& s_obs, std::size_t n,
                 TraceScaling scaling = TraceScaling::kInverseN);
ScoreReport sl_score_ma1(double theta, const Vector& s_obs, std::size_t n,
                         TraceScaling scaling = TraceScaling::kInverseN);

// Limit counterparts with s -> b0 and n Sigma_n -> Sigma (the trace term
// vanishes): M(theta) and H(theta) = dM/dtheta.
double ma1_limit_score(double theta, const Vector& b0);
double ma1_limit_hessian(double theta, const Vector& b0);

using ScoreFn = std::function<double(double)>;

double central_difference(const ScoreFn& f, double x);

struct Root {
  double theta = 0.0;
  double hessian = 0.0;
  bool is_local_max = false;
};

struct RootSet {
  std::vector<Root> roots;
  bool no_sign_change = false;

  std::size_t local_max_count() const;
};

// Sign changes of score_fn on the grid, refined by bisection until
// |score| < 1e-8 or the bracket is at machine resolution.
RootSet find_roots(const ScoreFn& score_fn, std::span<const double> grid);

struct ShapeCheck {
  double delta_hat = 0.0;
  double delta = 0.0;
  double discrepancy = 0.0;
  std::size_t points = 0;
};

// Least-squares quadratic fit of ln(density) on grid points with
// |theta - root| <= window; delta_hat = -1 / (n * curvature) is compared with
// delta = -1 / hessian. Throws InsufficientResolutionError with < 5 points.
ShapeCheck local_shape_check(const GridPosterior& post, double root, double window,
                             std::size_t n, double hessian);

struct SandwichReport {
  Matrix Delta;
  Matrix W;
  Matrix sandwich;
};

// Delta = (-H)^{-1}, W = G' Sigma^{-1} V Sigma^{-1} G, sandwich = Delta W Delta'.
// G is d x p. Throws NotAMaxError unless H is negative definite.
SandwichReport sandwich_variance(const Matrix& G, const Matrix& Sigma, const Matrix& V,
                                 const Matrix& H);

struct HessianScanRow {
  double theta = 0.0;
  double loglik = 0.0;
  double score = 0.0;
  double hessian = 0.0;
  bool is_mode = false;
};

// ln g_n, M_n and H_n over the grid; interior grid points that are strict
// local maxima of ln g_n with negative Hessian are flagged as modes.
std::vector<HessianScanRow> hessian_scan(const Vector& s_obs, std::size_t n,
                                         std::span<const double> grid);

// Integral of |t| |p(t) - N(t; 0, delta)| dt for the grid posterior mapped to
// t = sqrt(n) (theta - center).
double bvm_weighted_l1(const GridPosterior& post, double center, double delta,
                       std::size_t n);

}  // namespace bslmis
