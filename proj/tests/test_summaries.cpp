#include "bslmis/models.hpp"
#include "bslmis/stats.hpp"
#include "bslmis/summaries.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

using namespace bslmis;

namespace {

constexpr std::array<std::size_t, 2> kLags{0, 1};

}  // namespace

TEST_CASE("autocovariance summaries by hand") {
  const auto a = autocov_summaries(TimeSeries({1, 1, 1, 1}), kLags);
  CHECK(a.values(0) == doctest::Approx(1.0));
  CHECK(a.values(1) == doctest::Approx(0.75));
  const auto b = autocov_summaries(TimeSeries({1, -1, 1, -1}), kLags);
  CHECK(b.values(0) == doctest::Approx(1.0));
  CHECK(b.values(1) == doctest::Approx(-0.75));
  const auto z = autocov_summaries(TimeSeries({0, 0, 0}), kLags);
  CHECK(z.values.isZero());
  CHECK(a.labels.size() == 2);
  const std::array<std::size_t, 1> bad{4};
  CHECK_THROWS_AS(autocov_summaries(TimeSeries({1, 2, 3, 4}), bad), DomainError);
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> y{4, 1, 3, 2, 5};
  const std::array<double, 4> p{0.0, 0.25, 0.5, 0.9};
  const auto q = quantiles_type7(y, p);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(2.0));
  CHECK(q[2] == doctest::Approx(3.0));
  CHECK(q[3] == doctest::Approx(4.6));
}

TEST_CASE("g-and-k summaries are equivariant") {
  const auto y = simulate_gk({0.0, 1.0, 0.5, 0.2}, 400, 21);
  const Vector s = gk_values(y.values(), true);

  SUBCASE("symmetric sample") {
    std::vector<double> sym(y.values().begin(), y.values().end());
    for (double v : y.values()) sym.push_back(-v);
    CHECK(std::fabs(gk_values(sym, false)(2)) < 1e-12);
  }
  SUBCASE("shift") {
    std::vector<double> sh;
    for (double v : y.values()) sh.push_back(v + 2.5);
    const Vector t = gk_values(sh, true);
    CHECK(t(0) == doctest::Approx(s(0) + 2.5));
    CHECK(t(1) == doctest::Approx(s(1)));
    CHECK(t(2) == doctest::Approx(s(2)));
  }
  SUBCASE("scale") {
    std::vector<double> sc;
    for (double v : y.values()) sc.push_back(3.0 * v);
    const Vector t = gk_values(sc, true);
    CHECK(t(1) == doctest::Approx(3.0 * s(1)));
    CHECK(t(2) == doctest::Approx(s(2)));
    CHECK(t(3) - t(0) == doctest::Approx(3.0 * (s(3) - s(0))));
  }
  CHECK_THROWS_AS(gk_summaries(TimeSeries({1, 1, 1, 1, 1}), false), DegenerateSummaryError);
}

TEST_CASE("block bootstrap covariance") {
  const SummaryFn mean_fn = [](std::span<const double> v) {
    return Vector::Constant(1, mean_of(v));
  };
  SUBCASE("constant series has zero variance") {
    const TimeSeries y(std::vector<double>(50, 2.0));
    CHECK(block_bootstrap_cov(y, mean_fn, {5, 200, 1}).norm() < 1e-20);
  }
  SUBCASE("iid mean matches s^2 / n") {
    const std::size_t n = 10000;
    const auto y = simulate_ma1({0.0}, n, 77);
    const Matrix c = block_bootstrap_cov(y, mean_fn, {1, 2000, 5});
    const double oracle = variance_of(y.values()) / double(n);
    CHECK(c(0, 0) == doctest::Approx(oracle).epsilon(0.15));
  }
  SUBCASE("seeded and thread independent") {
    const auto y = simulate_sv({}, 300, 2);
    const SummaryFn ac = [](std::span<const double> v) {
      return autocov_values(v, kLags);
    };
    const Matrix a = block_bootstrap_cov(y, ac, {10, 100, 9}, 1);
    const Matrix b = block_bootstrap_cov(y, ac, {10, 100, 9}, 3);
    CHECK(a == b);
  }
  CHECK_THROWS_AS(block_bootstrap_cov(TimeSeries({1, 2, 3}), mean_fn, {10, 10, 1}),
                  DomainError);
}

TEST_CASE("block resample keeps length and draws contiguous blocks") {
  std::vector<double> y(23);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = double(i);
  Rng rng(4);
  std::vector<double> out;
  block_resample(y, 5, rng, out);
  CHECK(out.size() == y.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i % 5 != 0) CHECK(out[i] == std::fmod(out[i - 1] + 1.0, 23.0));
  }
}
