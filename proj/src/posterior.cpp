#include "bslmis/posterior.hpp"

#include "bslmis/linalg.hpp"
#include "bslmis/parallel.hpp"
#include "bslmis/stats.hpp"
#include "bslmis/synthlik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bslmis {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Integral of the linear interpolant of f over [g[i], g[i] + u].
double cell_partial(const GridPosterior& p, std::size_t i, double u) {
  const double h = p.grid[i + 1] - p.grid[i];
  const double f0 = p.density[i];
  const double f1 = p.density[i + 1];
  return f0 * u + 0.5 * (f1 - f0) * u * u / h;
}

double cdf_at(const GridPosterior& p, double x) {
  const auto& g = p.grid;
  if (x <= g.front()) return 0.0;
  if (x >= g.back()) return 1.0;
  double acc = 0.0;
  std::size_t i = 0;
  for (; i + 1 < g.size() && g[i + 1] <= x; ++i) {
    acc += 0.5 * (p.density[i] + p.density[i + 1]) * (g[i + 1] - g[i]);
  }
  if (i + 1 < g.size()) acc += cell_partial(p, i, x - g[i]);
  return std::min(acc, 1.0);
}

}  // namespace

double GridPosterior::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    s += 0.5 * h * (grid[i] * density[i] + grid[i + 1] * density[i + 1]);
  }
  return s;
}

double GridPosterior::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const double a = grid[i] - mu;
    const double b = grid[i + 1] - mu;
    s += 0.5 * h * (a * a * density[i] + b * b * density[i + 1]);
  }
  return s;
}

double GridPosterior::mass_between(double a, double b) const {
  if (b < a) std::swap(a, b);
  return cdf_at(*this, b) - cdf_at(*this, a);
}

double GridPosterior::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile p outside [0, 1]");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const double cell = 0.5 * (density[i] + density[i + 1]) * h;
    if (acc + cell >= p && cell > 0.0) {
      // Solve f0 u + (f1 - f0) u^2 / (2h) = target for u in [0, h].
      const double target = p - acc;
      const double f0 = density[i];
      const double slope = (density[i + 1] - f0) / h;
      double u;
      if (std::fabs(slope) * h < 1e-12 * std::max(f0, 1e-300)) {
        u = target / f0;
      } else {
        const double disc = std::max(f0 * f0 + 2.0 * slope * target, 0.0);
        u = 2.0 * target / (f0 + std::sqrt(disc));
      }
      return grid[i] + std::clamp(u, 0.0, h);
    }
    acc += cell;
  }
  return grid.back();
}

std::size_t GridPosterior::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(log_unnorm.begin(), log_unnorm.end()) - log_unnorm.begin());
}

GridPosterior grid_posterior(const ScalarLogFn& loglik,
                             const ScalarLogFn& log_prior,
                             std::vector<double> grid, unsigned threads) {
  if (grid.size() < 101) {
    throw DomainError("grid posterior needs at least 101 points, got " +
                      std::to_string(grid.size()));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  }
  GridPosterior out;
  out.grid = std::move(grid);
  const std::size_t k = out.grid.size();
  out.log_unnorm.assign(k, kNegInf);
  parallel_for(k, threads, [&](std::size_t i) {
    const double lp = log_prior(out.grid[i]);
    if (lp == kNegInf) return;
    const double ll = loglik(out.grid[i]);
    out.log_unnorm[i] = lp + ll;
  });
  double top = kNegInf;
  for (std::size_t i = 0; i < k; ++i) {
    if (std::isnan(out.log_unnorm[i])) {
      throw DomainError("log posterior is NaN at theta = " +
                        std::to_string(out.grid[i]));
    }
    top = std::max(top, out.log_unnorm[i]);
  }
  if (top == kNegInf) {
    throw DegeneratePosteriorError("log likelihood is -inf on the whole grid");
  }
  if (top == std::numeric_limits<double>::infinity()) {
    throw DegeneratePosteriorError("log posterior is +inf on the grid");
  }
  out.density.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.density[i] = std::exp(out.log_unnorm[i] - top);
  double z = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    z += 0.5 * (out.density[i] + out.density[i + 1]) * (out.grid[i + 1] - out.grid[i]);
  }
  if (!(z > 0.0)) throw DegeneratePosteriorError("posterior has zero trapezoid mass");
  for (double& d : out.density) d /= z;
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw DomainError("linspace needs at least 2 points");
  std::vector<double> g(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

std::vector<double> ma1_default_grid() { return linspace(-0.999, 0.999, 2001); }

std::vector<std::size_t> posterior_modes(const GridPosterior& post,
                                         double rel_height) {
  const double top = *std::max_element(post.density.begin(), post.density.end());
  std::vector<std::size_t> out;
  for (std::size_t i : local_maxima(post.density)) {
    if (post.density[i] >= rel_height * top) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> argmax_cells(const GridPosterior& post) {
  return local_maxima(post.log_unnorm);
}

std::vector<double> sample_grid(const GridPosterior& post, std::size_t count,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> draws(count);
  for (auto& d : draws) d = post.quantile(rng.uniform());
  return draws;
}

// ---- MCMC ------------------------------------------------------------------

std::vector<double> Chain::column(std::size_t j) const {
  std::vector<double> c(static_cast<std::size_t>(theta.rows()));
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    c[static_cast<std::size_t>(i)] = theta(i, static_cast<Eigen::Index>(j));
  }
  return c;
}

std::vector<double> Chain::gamma_column(std::size_t j) const {
  if (!has_gamma()) throw DomainError("chain carries no gamma draws");
  std::vector<double> c(static_cast<std::size_t>(gamma.rows()));
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    c[static_cast<std::size_t>(i)] = gamma(i, static_cast<Eigen::Index>(j));
  }
  return c;
}

namespace {

struct StateEstimate {
  SynthLikEstimate est;
  Matrix cov_scale;  // r-BSL only: rbsl_scale of est.cov
};

// Global scale adaptation toward the [0.234, 0.44] acceptance band.
class ScaleAdapter {
 public:
  ScaleAdapter(bool enabled, std::size_t batch) : enabled_(enabled), batch_(batch) {}

  double scale() const { return scale_; }

  // Returns true when a batch closed and the scale changed.
  bool record(bool accepted) {
    if (!enabled_ || batch_ == 0) return false;
    hits_ += accepted ? 1 : 0;
    if (++count_ < batch_) return false;
    const double rate = static_cast<double>(hits_) / static_cast<double>(count_);
    ++batches_;
    const double step = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(batches_)));
    if (rate < 0.234) scale_ *= std::exp(-step);
    if (rate > 0.44) scale_ *= std::exp(step);
    scale_ = std::clamp(scale_, 1e-3, 1e3);
    hits_ = count_ = 0;
    return true;
  }

 private:
  bool enabled_;
  std::size_t batch_;
  std::size_t hits_ = 0;
  std::size_t count_ = 0;
  std::size_t batches_ = 0;
  double scale_ = 1.0;
};

// Random-walk increments scale * L z with L L' the proposal covariance.
class Proposer {
 public:
  explicit Proposer(const McmcConfig& cfg) {
    if (cfg.proposal_cov) {
      const Matrix& c = *cfg.proposal_cov;
      if (c.rows() != cfg.theta0.size() || c.cols() != cfg.theta0.size()) {
        throw DomainError("proposal_cov has the wrong dimension");
      }
      chol_ = cholesky(c, "proposal covariance").matrixL();
    } else {
      if (cfg.proposal_sd.size() != cfg.theta0.size()) {
        throw DomainError("proposal_sd has the wrong dimension");
      }
      if ((cfg.proposal_sd.array() <= 0.0).any()) {
        throw DomainError("proposal standard deviations must be positive");
      }
      chol_ = cfg.proposal_sd.asDiagonal();
    }
  }

  Vector propose(const Vector& theta, double scale, Rng& rng) const {
    Vector z(theta.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
    return theta + scale * (chol_ * z);
  }

 private:
  Matrix chol_;
};

void check_config(const BslTarget& target, const McmcConfig& cfg) {
  const auto p = static_cast<Eigen::Index>(target.model.param_dim());
  if (cfg.theta0.size() != p) throw DomainError("theta0 has the wrong dimension");
  if (!target.model.in_support(cfg.theta0) ||
      !std::isfinite(target.log_prior(cfg.theta0))) {
    throw DomainError("theta0 lies outside the prior support");
  }
  if (target.s_obs.size() != static_cast<Eigen::Index>(target.model.summary_dim())) {
    throw DomainError("observed summaries have the wrong dimension");
  }
}

// Draws the initial SL estimate, retrying with fresh seeds when the first
// simulations happen to give a singular covariance.
SynthLikEstimate draw_estimate(const BslTarget& t, const Vector& theta,
                               std::uint64_t seed) {
  if (!t.fixed_cov) return estimate_sl(t.model, theta, t.m, t.n, seed, t.threads);
  SynthLikEstimate est;
  est.m = t.m;
  est.mean.values = estimate_sl_mean(t.model, theta, t.m, t.n, seed, t.threads);
  est.mean.labels = t.model.summary_labels;
  est.cov = *t.fixed_cov;
  return est;
}

StateEstimate initial_estimate(const BslTarget& t, const Vector& theta, Rng& rng,
                               std::optional<GammaForm> form) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    try {
      StateEstimate s{draw_estimate(t, theta, rng.next_u64()), {}};
      if (form) s.cov_scale = rbsl_scale(s.est.cov, *form);
      return s;
    } catch (const SingularityError&) {
    }
  }
  throw SingularityError("SL covariance singular at the initial state", theta, t.m);
}

Chain make_chain(const BslTarget& t, const McmcConfig& cfg, std::uint64_t seed,
                 bool with_gamma) {
  Chain c;
  c.param_names = t.model.param_names;
  c.seed = seed;
  const auto n_iter = static_cast<Eigen::Index>(cfg.n_iter);
  c.theta.resize(n_iter, static_cast<Eigen::Index>(t.model.param_dim()));
  if (with_gamma) {
    for (const auto& l : t.model.summary_labels) c.gamma_names.push_back("gamma_" + l);
    c.gamma.resize(n_iter, static_cast<Eigen::Index>(t.model.summary_dim()));
  }
  c.loglik.reserve(cfg.n_iter);
  c.accepted.reserve(cfg.n_iter);
  return c;
}

void finish_chain(Chain& c, double gamma_hits, double gamma_tries) {
  c.acceptance_rate = c.size() == 0
                          ? std::numeric_limits<double>::quiet_NaN()
                          : static_cast<double>(c.n_accepted) / static_cast<double>(c.size());
  c.gamma_acceptance_rate =
      gamma_tries > 0.0 ? gamma_hits / gamma_tries : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

GammaForm parse_gamma_form(const std::string& name) {
  if (name == "diag-scale") return GammaForm::kDiagonalScale;
  if (name == "sym-sqrt") return GammaForm::kSymmetricSqrt;
  throw DomainError("unknown gamma form '" + name + "' (want diag-scale or sym-sqrt)");
}

std::string to_string(GammaForm form) {
  return form == GammaForm::kDiagonalScale ? "diag-scale" : "sym-sqrt";
}

Matrix rbsl_scale(const Matrix& cov, GammaForm form) {
  if (form == GammaForm::kSymmetricSqrt) return sym_sqrt(cov);
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double rbsl_logpdf(const Vector& mean, const Matrix& scale, const Matrix& cov,
                   const Vector& gamma, const Vector& s, GammaForm form) {
  const Vector f = form == GammaForm::kSymmetricSqrt ? gamma : Vector(gamma.array().square());
  const Matrix inflated = cov + scale * f.asDiagonal() * scale;
  return sl_logpdf(mean, inflated, s);
}

Chain bsl_rwmh(const BslTarget& target, const McmcConfig& cfg, std::uint64_t seed) {
  check_config(target, cfg);
  Rng rng(seed);
  Chain chain = make_chain(target, cfg, seed, false);

  Vector theta = cfg.theta0;
  double cur_lp = target.log_prior(theta);
  StateEstimate cur = initial_estimate(target, theta, rng, std::nullopt);
  double cur_ll = sl_logpdf(cur.est, target.s_obs);

  ScaleAdapter adapter(cfg.adapt, cfg.adapt_batch);
  const Proposer proposer(cfg);
  const std::size_t total = cfg.burn_in + cfg.n_iter;
  for (std::size_t it = 0; it < total; ++it) {
    const Vector prop = proposer.propose(theta, adapter.scale(), rng);
    const double log_u = std::log(rng.uniform());
    bool accept = false;
    if (target.model.in_support(prop)) {
      const double lp = target.log_prior(prop);
      if (std::isfinite(lp)) {
        const std::uint64_t est_seed = rng.next_u64();
        try {
          SynthLikEstimate est = draw_estimate(target, prop, est_seed);
          const double ll = sl_logpdf(est, target.s_obs);
          if (log_u < ll + lp - cur_ll - cur_lp) {
            accept = true;
            theta = prop;
            cur_lp = lp;
            cur_ll = ll;
            cur.est = std::move(est);
          }
        } catch (const SingularityError&) {
          ++chain.singular_proposals;
        } catch (const FactorizationError&) {
          ++chain.singular_proposals;
        } catch (const DegenerateSummaryError&) {
          ++chain.singular_proposals;
        }
      }
    }
    if (it < cfg.burn_in) {
      if (adapter.record(accept)) chain.proposal_scale.push_back(adapter.scale());
      continue;
    }
    const auto row = static_cast<Eigen::Index>(it - cfg.burn_in);
    chain.theta.row(row) = theta.transpose();
    chain.loglik.push_back(cur_ll);
    chain.accepted.push_back(accept ? 1 : 0);
    chain.n_accepted += accept ? 1 : 0;
  }
  chain.proposal_scale.push_back(adapter.scale());
  finish_chain(chain, 0.0, 0.0);
  return chain;
}

Chain rbsl_mh(const BslTarget& target, const McmcConfig& cfg, std::uint64_t seed) {
  check_config(target, cfg);
  if (!(cfg.gamma_prior_mean > 0.0)) {
    throw DomainError("gamma prior mean must be positive");
  }
  if (!(cfg.gamma_proposal_sd > 0.0)) {
    throw DomainError("gamma proposal sd must be positive");
  }
  Rng rng(seed);
  Chain chain = make_chain(target, cfg, seed, true);
  const auto d = static_cast<Eigen::Index>(target.model.summary_dim());
  const double mu = cfg.gamma_prior_mean;

  Vector theta = cfg.theta0;
  Vector gamma = cfg.gamma_fixed_zero ? Vector::Zero(d) : Vector::Constant(d, mu);
  double cur_lp = target.log_prior(theta);
  const GammaForm form = cfg.gamma_form;
  StateEstimate cur = initial_estimate(target, theta, rng, form);
  double cur_ll = rbsl_logpdf(cur.est.mean.values, cur.cov_scale, cur.est.cov, gamma,
                              target.s_obs, form);

  ScaleAdapter adapter(cfg.adapt, cfg.adapt_batch);
  const Proposer proposer(cfg);
  ScaleAdapter gamma_adapter(cfg.adapt, cfg.adapt_batch * static_cast<std::size_t>(d));
  double gamma_hits = 0.0;
  double gamma_tries = 0.0;
  const std::size_t total = cfg.burn_in + cfg.n_iter;
  for (std::size_t it = 0; it < total; ++it) {
    // theta block: fresh SL estimate at the proposal, current Gamma.
    const Vector prop = proposer.propose(theta, adapter.scale(), rng);
    const double log_u = std::log(rng.uniform());
    bool accept = false;
    if (target.model.in_support(prop)) {
      const double lp = target.log_prior(prop);
      if (std::isfinite(lp)) {
        const std::uint64_t est_seed = rng.next_u64();
        try {
          StateEstimate s{draw_estimate(target, prop, est_seed), {}};
          s.cov_scale = rbsl_scale(s.est.cov, form);
          const double ll = rbsl_logpdf(s.est.mean.values, s.cov_scale, s.est.cov, gamma,
                                        target.s_obs, form);
          if (log_u < ll + lp - cur_ll - cur_lp) {
            accept = true;
            theta = prop;
            cur_lp = lp;
            cur_ll = ll;
            cur = std::move(s);
          }
        } catch (const SingularityError&) {
          ++chain.singular_proposals;
        } catch (const FactorizationError&) {
          ++chain.singular_proposals;
        } catch (const DegenerateSummaryError&) {
          ++chain.singular_proposals;
        }
      }
    }

    // Gamma block: one log-scale random-walk update per coordinate, scored
    // against the retained estimate of the current theta.
    if (!cfg.gamma_fixed_zero) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double step = gamma_adapter.scale() * cfg.gamma_proposal_sd * rng.normal();
        const double g_old = gamma(j);
        const double g_new = g_old * std::exp(step);
        const double log_u_g = std::log(rng.uniform());
        gamma(j) = g_new;
        double ll_new = kNegInf;
        try {
          ll_new = rbsl_logpdf(cur.est.mean.values, cur.cov_scale, cur.est.cov, gamma,
                               target.s_obs, form);
        } catch (const FactorizationError&) {
        }
        // Exp(mean mu) prior and the Jacobian of the log-scale move.
        const double log_ratio = ll_new - cur_ll - (g_new - g_old) / mu + step;
        const bool ok = g_new > 0.0 && std::isfinite(g_new) && log_u_g < log_ratio;
        if (ok) {
          cur_ll = ll_new;
          gamma_hits += it >= cfg.burn_in ? 1.0 : 0.0;
        } else {
          gamma(j) = g_old;
        }
        gamma_tries += it >= cfg.burn_in ? 1.0 : 0.0;
        if (it < cfg.burn_in) gamma_adapter.record(ok);
      }
    }

    if (it < cfg.burn_in) {
      if (adapter.record(accept)) chain.proposal_scale.push_back(adapter.scale());
      continue;
    }
    const auto row = static_cast<Eigen::Index>(it - cfg.burn_in);
    chain.theta.row(row) = theta.transpose();
    chain.gamma.row(row) = gamma.transpose();
    chain.loglik.push_back(cur_ll);
    chain.accepted.push_back(accept ? 1 : 0);
    chain.n_accepted += accept ? 1 : 0;
  }
  chain.proposal_scale.push_back(adapter.scale());
  finish_chain(chain, gamma_hits, gamma_tries);
  return chain;
}

Chain rwmh(const std::function<double(const Vector&)>& log_target,
           std::vector<std::string> param_names, const McmcConfig& cfg,
           std::uint64_t seed) {
  const auto p = static_cast<Eigen::Index>(param_names.size());
  if (cfg.theta0.size() != p) throw DomainError("rwmh: theta0 has the wrong dimension");
  Rng rng(seed);
  Chain chain;
  chain.param_names = std::move(param_names);
  chain.seed = seed;
  chain.theta.resize(static_cast<Eigen::Index>(cfg.n_iter), p);
  chain.loglik.reserve(cfg.n_iter);
  chain.accepted.reserve(cfg.n_iter);

  Vector theta = cfg.theta0;
  double cur = log_target(theta);
  if (!std::isfinite(cur)) throw DomainError("rwmh: initial state has zero density");
  ScaleAdapter adapter(cfg.adapt, cfg.adapt_batch);
  const Proposer proposer(cfg);
  const std::size_t total = cfg.burn_in + cfg.n_iter;
  for (std::size_t it = 0; it < total; ++it) {
    const Vector prop = proposer.propose(theta, adapter.scale(), rng);
    const double log_u = std::log(rng.uniform());
    const double lt = log_target(prop);
    const bool accept = std::isfinite(lt) && log_u < lt - cur;
    if (accept) {
      theta = prop;
      cur = lt;
    }
    if (it < cfg.burn_in) {
      if (adapter.record(accept)) chain.proposal_scale.push_back(adapter.scale());
      continue;
    }
    chain.theta.row(static_cast<Eigen::Index>(it - cfg.burn_in)) = theta.transpose();
    chain.loglik.push_back(cur);
    chain.accepted.push_back(accept ? 1 : 0);
    chain.n_accepted += accept ? 1 : 0;
  }
  chain.proposal_scale.push_back(adapter.scale());
  finish_chain(chain, 0.0, 0.0);
  return chain;
}

// ---- Rejection ABC ---------------------------------------------------------

AbcResult rejection_abc(const ModelSpec& model, const PriorSampler& prior,
                        const Vector& s_obs, std::size_t n, std::size_t n_sims,
                        double keep_frac, std::uint64_t seed, unsigned threads) {
  if (!(keep_frac > 0.0 && keep_frac <= 1.0)) {
    throw DomainError("keep_frac must lie in (0, 1]");
  }
  if (n_sims == 0) throw DomainError("rejection ABC needs n_sims >= 1");
  const auto p = static_cast<Eigen::Index>(model.param_dim());
  Matrix thetas(static_cast<Eigen::Index>(n_sims), p);
  std::vector<double> dist(n_sims);
  parallel_for(n_sims, threads, [&](std::size_t i) {
    Rng prior_rng(derive_seed(seed, 2 * i));
    const Vector th = prior(prior_rng);
    thetas.row(static_cast<Eigen::Index>(i)) = th.transpose();
    try {
      const TimeSeries z = model.simulate(th, n, derive_seed(seed, 2 * i + 1));
      dist[i] = (model.summarize(z.values()) - s_obs).norm();
    } catch (const DegenerateSummaryError&) {
      dist[i] = std::numeric_limits<double>::infinity();
    }
  });

  const auto keep = static_cast<std::size_t>(
      std::ceil(keep_frac * static_cast<double>(n_sims) - 1e-9));
  std::vector<std::size_t> idx(n_sims);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  AbcResult out;
  out.draws.resize(static_cast<Eigen::Index>(keep), p);
  out.distances.resize(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    out.draws.row(static_cast<Eigen::Index>(k)) = thetas.row(static_cast<Eigen::Index>(idx[k]));
    out.distances[k] = dist[idx[k]];
  }
  out.threshold = keep > 0 ? out.distances.back() : 0.0;
  return out;
}

}  // namespace bslmis
