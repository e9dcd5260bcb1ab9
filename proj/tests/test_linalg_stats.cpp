#include "bslmis/linalg.hpp"
#include "bslmis/rng.hpp"
#include "bslmis/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace bslmis;

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("symmetric square roots") {
  Matrix a(3, 3);
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Matrix s = sym_sqrt(a);
  CHECK((s * s - a).norm() < 1e-12);
  CHECK((s - s.transpose()).norm() < 1e-15);
  CHECK((sym_inv_sqrt(a) * s - Matrix::Identity(3, 3)).norm() < 1e-12);
  Matrix psd = Matrix::Zero(2, 2);
  psd(0, 0) = 1.0;
  CHECK((sym_sqrt(psd) - psd).norm() < 1e-15);
  Matrix neg(2, 2);
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(sym_sqrt(neg), DomainError);
  CHECK_THROWS_AS(cholesky(neg), FactorizationError);
}

TEST_CASE("moments and quantiles") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(mean_of(x) == 3.0);
  CHECK(variance_of(x) == 2.5);
  CHECK(skewness_of(x) == doctest::Approx(0.0));
  CHECK(quantile_of(x, 0.5) == 3.0);
  const auto iv = equal_tailed_interval(x, 0.5);
  CHECK(iv.lo == 2.0);
  CHECK(iv.hi == 4.0);
  CHECK(iv.contains(3.0));
  CHECK_FALSE(iv.contains(4.5));
  CHECK_THROWS_AS(mean_of(std::vector<double>{}), DomainError);
}

TEST_CASE("KS distances are calibrated") {
  Rng rng(8);
  std::vector<double> e(10000), u(10000);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = -0.5 * std::log(rng.uniform());
    u[i] = 2.0 * rng.uniform() - 1.0;
  }
  CHECK(ks_distance_exponential(e, 0.5) < 0.05);
  CHECK(ks_distance_exponential(e, 2.0) > 0.3);
  CHECK(ks_distance_uniform(u, -1.0, 1.0) < 0.05);
  const std::vector<double> pt(100, 0.0);
  CHECK(ks_distance_uniform(pt, 0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("local maxima and KDE modes") {
  const std::vector<double> f{0, 1, 1, 1, 0, 2, 0};
  const auto m = local_maxima(f);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == 2);
  CHECK(m[1] == 5);
  CHECK(local_maxima(std::vector<double>{1, 1, 1}).empty());
  CHECK(local_maxima(std::vector<double>{3, 1, 2}).size() == 2);

  Rng rng(12);
  std::vector<double> uni(4000), bi(4000);
  for (std::size_t i = 0; i < uni.size(); ++i) {
    uni[i] = rng.normal();
    bi[i] = (i % 2 ? 4.0 : -4.0) + rng.normal();
  }
  CHECK(kde_mode_count(uni) == 1);
  CHECK(kde_mode_count(bi) == 2);
  const auto curve = kde_silverman(uni);
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < curve.x.size(); ++i) {
    mass += 0.5 * (curve.x[i + 1] - curve.x[i]) * (curve.density[i] + curve.density[i + 1]);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
  // a smaller effective n widens the bandwidth
  CHECK(kde_silverman(uni, 512, 100.0).bandwidth > curve.bandwidth);
}

TEST_CASE("effective sample size") {
  Rng rng(2);
  std::vector<double> iid(5000), ar(5000);
  double state = 0.0;
  for (std::size_t i = 0; i < iid.size(); ++i) {
    iid[i] = rng.normal();
    state = 0.9 * state + rng.normal();
    ar[i] = state;
  }
  CHECK(effective_sample_size(iid) > 4000);
  // AR(1) with rho = 0.9: ESS about n (1 - rho) / (1 + rho)
  const double ess = effective_sample_size(ar);
  CHECK(ess == doctest::Approx(5000.0 * 0.1 / 1.9).epsilon(0.35));
  CHECK(effective_sample_size(iid) <= 5000.0);
  CHECK_THROWS_AS(effective_sample_size(std::vector<double>{1, 2, 3}), DomainError);
}

TEST_CASE("batch means standard error") {
  Rng rng(6);
  std::vector<double> x(10000);
  for (double& v : x) v = rng.normal();
  CHECK(batch_means_se(x) == doctest::Approx(0.01).epsilon(0.3));
}
