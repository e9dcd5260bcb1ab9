#include "bslmis/asymptotics.hpp"
#include "bslmis/posterior.hpp"
#include "bslmis/synthlik.hpp"

#include <doctest.h>

#include <cmath>

using namespace bslmis;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

GridPosterior exact_post(const Vector& s, std::size_t n) {
  return grid_posterior([&](double t) { return ma1_exact_loglik(t, s, n); },
                        [](double) { return 0.0; }, ma1_default_grid());
}

std::vector<double> interior_grid() {
  std::vector<double> g;
  for (double t : ma1_default_grid()) {
    if (std::fabs(t) < 0.998) g.push_back(t);
  }
  return g;
}

}  // namespace

TEST_CASE("score matches finite differences of the scaled log-SL") {
  const auto check = [](double theta, const Vector& s, std::size_t n) {
    const double h = 1e-5 * std::max(1.0, std::fabs(theta));
    const double fd = (ma1_exact_loglik(theta + h, s, n) - ma1_exact_loglik(theta - h, s, n)) /
                      (2.0 * h * double(n));
    const double sc = sl_score_ma1(theta, s, n).score;
    return std::fabs(sc - fd) / std::max(std::fabs(fd), 1e-300);
  };
  CHECK(check(0.4, v2(0.5, 0.0), 1000) < 1e-5);
  for (double t = -0.9; t <= 0.9; t += 0.15) {
    CHECK(check(t, v2(0.8, 0.1), 500) < 1e-5);
  }
  // the full-weight trace term does not match
  const double h = 1e-5;
  const Vector s = v2(0.5, 0.0);
  const double fd = (ma1_exact_loglik(0.4 + h, s, 1000) - ma1_exact_loglik(0.4 - h, s, 1000)) /
                    (2.0 * h * 1000.0);
  CHECK(std::fabs(ma1_score(0.4, s, 1000, TraceScaling::kOne) - fd) > 1e-3);
}

TEST_CASE("score symmetry and compatible limit") {
  const Vector s = v2(0.3, 0.0);
  for (double t : {0.05, 0.3, 0.77}) {
    CHECK(std::fabs(ma1_score(t, s, 1000) + ma1_score(-t, s, 1000)) < 1e-10);
  }
  const double theta = 0.35;
  const Vector b = ma1_exact_mean(theta).values;
  CHECK(std::fabs(ma1_score(theta, b, 1000000)) < 1e-4);
  CHECK(std::fabs(ma1_limit_score(theta, b)) < 1e-12);
  CHECK_THROWS_AS(ma1_score(0.999, s, 100), DomainError);
}

TEST_CASE("roots of the score") {
  SUBCASE("large S0: single maximum near zero") {
    const Vector s = v2(0.99, 0.0);
    const auto rs = find_roots([&](double t) { return ma1_score(t, s, 1000); }, interior_grid());
    REQUIRE(rs.local_max_count() == 1);
    for (const auto& r : rs.roots) {
      if (r.is_local_max) CHECK(std::fabs(r.theta) < 0.05);
      CHECK(std::fabs(ma1_score(r.theta, s, 1000)) < 1e-8);
    }
  }
  SUBCASE("S0 = 0.25: symmetric interior maxima, each a grid-posterior maximum") {
    const Vector s = v2(0.25, 0.0);
    const auto rs = find_roots([&](double t) { return ma1_score(t, s, 1000); }, interior_grid());
    std::vector<double> maxima;
    for (const auto& r : rs.roots) {
      if (r.is_local_max) maxima.push_back(r.theta);
    }
    REQUIRE(maxima.size() >= 2);
    CHECK(std::fabs(maxima.front() + maxima.back()) < 1e-6);
    const auto post = exact_post(s, 1000);
    for (double m : maxima) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < post.size(); ++i) {
        if (std::fabs(post.grid[i] - m) < std::fabs(post.grid[best] - m)) best = i;
      }
      double local = 0.0;
      for (std::size_t i = best - 3; i <= best + 3; ++i) local = std::max(local, post.density[i]);
      const bool hit = post.density[best - 1] == local || post.density[best] == local ||
                       post.density[best + 1] == local || post.density[best - 2] == local ||
                       post.density[best + 2] == local;
      CHECK(hit);
    }
  }
  SUBCASE("no sign change") {
    const auto rs = find_roots([](double) { return 1.0; }, linspace(-1, 1, 11));
    CHECK(rs.roots.empty());
    CHECK(rs.no_sign_change);
  }
}

TEST_CASE("local shape check") {
  SUBCASE("exact Gaussian log-density") {
    const std::size_t n = 1000;
    const double delta = 0.7, center = 0.1;
    const auto post = grid_posterior(
        [&](double t) { return -0.5 * double(n) * (t - center) * (t - center) / delta; },
        [](double) { return 0.0; }, linspace(-0.5, 0.5, 2001));
    const auto sc = local_shape_check(post, center, 0.08, n, -1.0 / delta);
    CHECK(sc.discrepancy < 1e-4);
    CHECK_THROWS_AS(local_shape_check(post, center, 1e-4, n, -1.0 / delta),
                    InsufficientResolutionError);
  }
  SUBCASE("unimodal MA(1) regime") {
    const Vector s = v2(0.99, 0.0);
    const std::size_t n = 1000;
    const auto post = exact_post(s, n);
    const double H = ma1_limit_hessian(0.0, s);
    const double window = 3.0 * std::sqrt(-1.0 / H / double(n));
    CHECK(local_shape_check(post, 0.0, window, n, H).discrepancy < 0.15);
  }
  SUBCASE("each mode of the bimodal regime") {
    const Vector s = v2(0.25, 0.0);
    const std::size_t n = 1000;
    const auto post = exact_post(s, n);
    const auto rs = find_roots([&](double t) { return ma1_limit_score(t, s); }, interior_grid());
    std::size_t checked = 0;
    for (const auto& r : rs.roots) {
      if (!r.is_local_max) continue;
      const double window = 3.0 * std::sqrt(-1.0 / r.hessian / double(n));
      CHECK(local_shape_check(post, r.theta, window, n, r.hessian).discrepancy < 0.25);
      ++checked;
    }
    CHECK(checked == 2);
  }
}

TEST_CASE("sandwich variance") {
  SUBCASE("correct specification collapses to Delta") {
    Matrix G(2, 1);
    G << 0.3, 1.0;
    Matrix S(2, 2);
    S << 2.0, 0.4, 0.4, 1.0;
    const Matrix H = -(G.transpose() * S.inverse() * G);
    const auto r = sandwich_variance(G, S, S, H);
    CHECK((r.sandwich - r.Delta).norm() < 1e-12);
    CHECK((r.Delta - (G.transpose() * S.inverse() * G).inverse()).norm() < 1e-12);
  }
  SUBCASE("scalar arithmetic") {
    const Matrix one = Matrix::Identity(1, 1);
    const auto r = sandwich_variance(one, one, 4.0 * one, -one);
    CHECK(r.Delta(0, 0) == doctest::Approx(1.0));
    CHECK(r.W(0, 0) == doctest::Approx(4.0));
    CHECK(r.sandwich(0, 0) == doctest::Approx(4.0));
  }
  const Matrix one = Matrix::Identity(1, 1);
  CHECK_THROWS_AS(sandwich_variance(one, one, one, one), NotAMaxError);
}

TEST_CASE("hessian scan") {
  const Vector s = v2(0.25, 0.0);
  const std::size_t n = 1000;
  const auto grid = linspace(-0.9, 0.9, 1801);
  const auto rows = hessian_scan(s, n, grid);
  REQUIRE(rows.size() == grid.size());
  const double dx = grid[1] - grid[0];
  for (std::size_t i = 1; i + 1 < rows.size(); i += 37) {
    const double fd2 = (rows[i + 1].loglik - 2.0 * rows[i].loglik + rows[i - 1].loglik) /
                       (dx * dx * double(n));
    CHECK(std::fabs(fd2 - rows[i].hessian) <= 1e-4 * std::max(1.0, std::fabs(rows[i].hessian)));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& mirror = rows[rows.size() - 1 - i];
    CHECK(std::fabs(rows[i].hessian - mirror.hessian) < 1e-6 * std::max(1.0, std::fabs(mirror.hessian)));
  }
  const auto post = grid_posterior([&](double t) { return ma1_exact_loglik(t, s, n); },
                                   [](double) { return 0.0; }, grid);
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].is_mode) flagged.push_back(i);
  }
  CHECK(flagged == posterior_modes(post, 0.0));
}

TEST_CASE("BvM distance shrinks with n in the unimodal regime") {
  const Vector s = v2(0.99, 0.0);
  const double delta = -1.0 / ma1_limit_hessian(0.0, s);
  double prev = 1e300;
  for (std::size_t n : {500, 1000, 4000}) {
    const auto post = exact_post(s, n);
    const double d = bvm_weighted_l1(post, 0.0, delta, n);
    CHECK(d < prev);
    prev = d;
  }
  CHECK_THROWS_AS(bvm_weighted_l1(exact_post(s, 500), 0.0, 0.0, 500), DomainError);
}
