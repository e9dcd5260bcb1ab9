#include "bslmis/adjust.hpp"
#include "bslmis/linalg.hpp"
#include "bslmis/stats.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace bslmis;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

Matrix random_pd(Rng& rng, int d) {
  Matrix a(d, d);
  for (int i = 0; i < d * d; ++i) a.data()[i] = rng.normal();
  return a * a.transpose() + 0.2 * Matrix::Identity(d, d);
}

}  // namespace

TEST_CASE("naive BSL grid posterior") {
  SUBCASE("identity mean map is conjugate") {
    const std::size_t n = 400;
    const MeanFn id = [](double t) { return Vector::Constant(1, t); };
    const auto post = naive_bsl_grid(id, [](double) { return 0.0; }, Vector::Constant(1, 0.2),
                                     default_naive_cov(1, n), linspace(-1, 1, 4001));
    CHECK(post.mean() == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(post.variance() == doctest::Approx(1.0 / n).epsilon(1e-4));
  }
  SUBCASE("mode is the argmin of the mean gap") {
    const MeanFn b = [](double t) { return ma1_exact_mean(t).values; };
    Vector s(2);
    s << 0.001, 0.0;
    const auto grid = ma1_default_grid();
    const auto post = naive_bsl_grid(b, [](double) { return 0.0; }, s, default_naive_cov(2, 1000), grid);
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if ((b(grid[i]) - s).norm() < (b(grid[best]) - s).norm()) best = i;
    }
    CHECK(post.argmax() == best);
    CHECK(std::fabs(post.grid[post.argmax()]) < 0.02);
  }
  CHECK_THROWS_AS(naive_bsl_grid([](double t) { return Vector::Constant(1, t); },
                                 [](double) { return 0.0; }, Vector::Zero(1), -scalar(1.0),
                                 linspace(-1, 1, 201)),
                  DomainError);
}

TEST_CASE("estimate_W on iid data reproduces the sample variance") {
  const std::size_t n = 5000;
  const auto y = simulate_sv({-0.5, 0.5, 0.2}, n, 3);
  const SummaryFn mean_fn = [](std::span<const double> v) { return Vector::Constant(1, mean_of(v)); };
  const MeanGradientFn grad = [](const Vector&) { return Matrix::Identity(1, 1); };
  const BootstrapSpec spec{1, 2000, 14};
  const Matrix W = estimate_W(y, mean_fn, Vector::Zero(1), grad, default_naive_cov(1, n), spec);
  CHECK(W(0, 0) == doctest::Approx(variance_of(y.values())).epsilon(0.15));
  CHECK(W == estimate_W(y, mean_fn, Vector::Zero(1), grad, default_naive_cov(1, n), spec));
}

TEST_CASE("adjust_draws algebra") {
  Matrix draws(5, 1);
  draws << -1, 0.5, 2, 3, 0;
  const Vector bar = Vector::Constant(1, 0.9);
  SUBCASE("self-consistent W leaves draws unchanged") {
    const auto r = adjust_draws(draws, bar, scalar(4.0), scalar(0.25));
    CHECK((r.draws - draws).norm() < 1e-12);
  }
  SUBCASE("Omega = 4, W = 1 doubles the spread") {
    const auto r = adjust_draws(draws, bar, scalar(4.0), scalar(1.0));
    CHECK(r.A(0, 0) == doctest::Approx(2.0));
    const auto lit = adjust_draws(draws, bar, scalar(4.0), scalar(1.0), {1.0, true});
    CHECK(lit.A(0, 0) == doctest::Approx(2.0));
    const auto lit2 = adjust_draws(draws, bar, scalar(4.0), scalar(4.0), {1.0, true});
    CHECK(lit2.A(0, 0) == doctest::Approx(8.0));
  }
  SUBCASE("n_scale multiplies A by its square root") {
    const auto r = adjust_draws(draws, bar, scalar(4.0), scalar(1.0), {9.0, false});
    CHECK(r.A(0, 0) == doctest::Approx(6.0));
  }
  SUBCASE("theta_bar is a fixed point") {
    Matrix at(1, 1);
    at << 0.9;
    CHECK(adjust_draws(at, bar, scalar(3.0), scalar(7.0)).draws(0, 0) == doctest::Approx(0.9));
  }
  CHECK_THROWS_AS(adjust_draws(draws, bar, scalar(-1.0), scalar(1.0)), DomainError);
  CHECK_THROWS_AS(adjust_draws(draws, bar, scalar(1.0), scalar(-1.0)), DomainError);
}

TEST_CASE("adjust_draws is affine with covariance A C A'") {
  Rng rng(19);
  for (int d = 1; d <= 4; ++d) {
    const Matrix Omega = random_pd(rng, d);
    const Matrix W = random_pd(rng, d);
    Matrix draws(300, d);
    for (int i = 0; i < draws.size(); ++i) draws.data()[i] = rng.normal();
    const Vector mean = draws.colwise().mean().transpose();
    const auto r = adjust_draws(draws, mean, Omega, W);
    CHECK((r.draws.colwise().mean().transpose() - mean).norm() < 1e-10);
    const Matrix expect = r.A * sample_cov(draws) * r.A.transpose();
    CHECK((sample_cov(r.draws) - expect).norm() < 1e-10 * std::max(1.0, expect.norm()));
    // default transform yields Omega W Omega when cov(draws) = Omega
    const Matrix target = Omega * W * Omega;
    CHECK((r.A * Omega * r.A.transpose() - target).norm() < 1e-9 * target.norm());
    // undo with the inverse map
    Matrix back = r.draws;
    const Matrix Ainv = r.A.inverse();
    for (Eigen::Index i = 0; i < back.rows(); ++i) {
      back.row(i) = (mean + Ainv * (r.draws.row(i).transpose() - mean)).transpose();
    }
    CHECK((back - draws).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("adjusted pipeline") {
  AdjustConfig cfg;
  cfg.n_draws = 4000;
  cfg.bootstrap = {10, 300, 5};
  cfg.draw_seed = 6;
  SUBCASE("SV data") {
    const auto y = simulate_sv({}, 1000, 77);
    const auto rep = run_adjusted_pipeline(y, cfg);
    CHECK(std::fabs(rep.adjusted_mean) < 0.05);
    CHECK(std::fabs(rep.naive_mean) < 0.05);
    CHECK(rep.adjusted_var < rep.naive_var);
    CHECK(rep.adjusted_interval.contains(0.0));
    CHECK(rep.adjusted_draws.rows() == 4000);
  }
  SUBCASE("compatible MA(1) data") {
    const auto y = simulate_ma1({0.3}, 1000, 78);
    const auto rep = run_adjusted_pipeline(y, cfg);
    const double se = std::sqrt(rep.naive_var / 4000.0);
    CHECK(std::fabs(rep.adjusted_mean - rep.naive_mean) < 3.0 * se + 1e-9);
    CHECK(std::fabs(rep.naive_mean - 0.3) < 0.1);
  }
}
