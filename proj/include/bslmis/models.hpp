#pragma once

#include "bslmis/common.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bslmis {

// Observed or simulated series y_{1:n}. Length is fixed at construction and
// every value must be finite.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> values, std::uint64_t seed = 0);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<double> values_;
  std::uint64_t seed_;
};

struct Ma1Params {
  double theta = 0.0;
  void validate() const;
};

struct SvParams {
  double omega = -0.736;
  double rho = 0.90;
  double sigma_v = 0.36;
  void validate() const;
  // Stationary mean of S_0 = y_t^2: exp(omega/(1-rho) + sigma_v^2/(2(1-rho^2))).
  double second_moment() const;
};

struct GkParams {
  double A = 0.0;
  double B = 1.0;
  double g = 0.0;
  double k = 0.0;
  static constexpr double c = 0.8;
  void validate() const;
};

// y_t = e_t + theta e_{t-1}, t = 1..n, from n+1 iid N(0,1) innovations.
TimeSeries simulate_ma1(const Ma1Params& params, std::size_t n,
                        std::uint64_t seed);

// y_t = exp(h_t/2) u_t, h_t = omega + rho h_{t-1} + sigma_v v_t, with h_0 drawn
// from the stationary law of the AR(1).
TimeSeries simulate_sv(const SvParams& params, std::size_t n,
                       std::uint64_t seed);

// Standard-normal quantile, Wichura's AS241 (PPND16) rational approximation;
// relative error about 1e-16 over (0, 1).
double normal_quantile(double p);

double gk_quantile(double p, const GkParams& params);

// Inversion sampling: y_i = gk_quantile(U_i), U_i iid uniform(0,1).
TimeSeries simulate_gk(const GkParams& params, std::size_t n,
                       std::uint64_t seed);

using SummaryFn = std::function<Vector(std::span<const double>)>;

// A parametric simulator together with its prior support and summary map.
// Parameters travel as a plain vector so samplers stay model-agnostic.
struct ModelSpec {
  std::string name;
  std::vector<std::string> param_names;
  std::vector<std::string> summary_labels;
  std::function<bool(const Vector&)> in_support;
  std::function<TimeSeries(const Vector&, std::size_t, std::uint64_t)> simulate;
  SummaryFn summarize;

  std::size_t param_dim() const { return param_names.size(); }
  std::size_t summary_dim() const { return summary_labels.size(); }
};

// MA(1) with autocovariance summaries (S_0, S_1) and support (-1, 1).
ModelSpec ma1_model();

// g-and-k with k held fixed; theta = (A, B, g) and uniform-prior support
// [-1,1] x (0,1] x [-5,5]. Summaries are S1..S3, plus S4 when include_tail.
ModelSpec gk_fixed_k_model(double k, bool include_tail);

}  // namespace bslmis
