#include "bslmis/models.hpp"

#include "bslmis/rng.hpp"
#include "bslmis/summaries.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bslmis {

TimeSeries::TimeSeries(std::vector<double> values, std::uint64_t seed)
    : values_(std::move(values)), seed_(seed) {
  if (values_.size() < 2) {
    throw DomainError("time series needs at least 2 values, got " +
                      std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite value at index " + std::to_string(i));
    }
  }
}

void Ma1Params::validate() const {
  if (!(theta > -1.0 && theta < 1.0)) {
    throw DomainError("MA(1) theta must lie in (-1, 1), got " +
                      std::to_string(theta));
  }
}

void SvParams::validate() const {
  if (!std::isfinite(omega)) throw DomainError("SV omega must be finite");
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("SV rho must lie in (0, 1), got " + std::to_string(rho));
  }
  if (!(sigma_v > 0.0 && sigma_v < 1.0)) {
    throw DomainError("SV sigma_v must lie in (0, 1), got " +
                      std::to_string(sigma_v));
  }
}

double SvParams::second_moment() const {
  return std::exp(omega / (1.0 - rho) +
                  0.5 * sigma_v * sigma_v / (1.0 - rho * rho));
}

void GkParams::validate() const {
  if (!std::isfinite(A)) throw DomainError("g-and-k A must be finite");
  if (!(B > 0.0) || !std::isfinite(B)) {
    throw DomainError("g-and-k B must be positive, got " + std::to_string(B));
  }
  if (!std::isfinite(g)) throw DomainError("g-and-k g must be finite");
  if (!(k > -0.5) || !std::isfinite(k)) {
    throw DomainError("g-and-k k must exceed -0.5, got " + std::to_string(k));
  }
}

TimeSeries simulate_ma1(const Ma1Params& params, std::size_t n,
                        std::uint64_t seed) {
  params.validate();
  if (n < 2) throw DomainError("MA(1) simulation needs n >= 2");
  Rng rng(seed);
  std::vector<double> y(n);
  double prev = rng.normal();
  for (std::size_t t = 0; t < n; ++t) {
    const double e = rng.normal();
    y[t] = e + params.theta * prev;
    prev = e;
  }
  return TimeSeries(std::move(y), seed);
}

TimeSeries simulate_sv(const SvParams& params, std::size_t n,
                       std::uint64_t seed) {
  params.validate();
  if (n < 2) throw DomainError("SV simulation needs n >= 2");
  Rng rng(seed);
  const double rho = params.rho;
  double h = params.omega / (1.0 - rho) +
             params.sigma_v / std::sqrt(1.0 - rho * rho) * rng.normal();
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    h = params.omega + rho * h + params.sigma_v * rng.normal();
    y[t] = std::exp(0.5 * h) * rng.normal();
  }
  return TimeSeries(std::move(y), seed);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal quantile needs p in (0, 1), got " +
                      std::to_string(p));
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

namespace {

inline double gk_transform(double z, const GkParams& p) {
  const double skew = 1.0 + GkParams::c * std::tanh(0.5 * p.g * z);
  const double kurt = p.k == 0.0 ? 1.0 : std::pow(1.0 + z * z, p.k);
  return p.A + p.B * skew * z * kurt;
}

}  // namespace

double gk_quantile(double p, const GkParams& params) {
  params.validate();
  return gk_transform(normal_quantile(p), params);
}

TimeSeries simulate_gk(const GkParams& params, std::size_t n,
                       std::uint64_t seed) {
  params.validate();
  if (n < 2) throw DomainError("g-and-k simulation needs n >= 2");
  Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = gk_transform(normal_quantile(rng.uniform()), params);
  return TimeSeries(std::move(y), seed);
}

ModelSpec ma1_model() {
  ModelSpec m;
  m.name = "ma1";
  m.param_names = {"theta"};
  m.summary_labels = {"S0", "S1"};
  m.in_support = [](const Vector& th) {
    return th.size() == 1 && th(0) > -1.0 && th(0) < 1.0;
  };
  m.simulate = [](const Vector& th, std::size_t n, std::uint64_t seed) {
    return simulate_ma1(Ma1Params{th(0)}, n, seed);
  };
  m.summarize = [](std::span<const double> y) {
    static constexpr std::size_t lags[] = {0, 1};
    return autocov_values(y, lags);
  };
  return m;
}

ModelSpec gk_fixed_k_model(double k, bool include_tail) {
  ModelSpec m;
  m.name = include_tail ? "gk-k0-S2" : "gk-k0-S1";
  m.param_names = {"A", "B", "g"};
  m.summary_labels = {"S1", "S2", "S3"};
  if (include_tail) m.summary_labels.push_back("S4");
  m.in_support = [](const Vector& th) {
    return th.size() == 3 && th(0) >= -1.0 && th(0) <= 1.0 && th(1) > 0.0 &&
           th(1) <= 1.0 && th(2) >= -5.0 && th(2) <= 5.0;
  };
  m.simulate = [k](const Vector& th, std::size_t n, std::uint64_t seed) {
    return simulate_gk(GkParams{th(0), th(1), th(2), k}, n, seed);
  };
  m.summarize = [include_tail](std::span<const double> y) {
    return gk_values(y, include_tail);
  };
  return m;
}

}  // namespace bslmis
