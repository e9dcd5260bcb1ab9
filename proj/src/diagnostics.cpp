#include "bslmis/diagnostics.hpp"

#include "bslmis/parallel.hpp"
#include "bslmis/rng.hpp"
#include "bslmis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bslmis {

double kldn(double mu_S, double sd_S, double mu_A, double sd_A) {
  if (!(sd_S > 0.0) || !(sd_A > 0.0)) {
    throw DomainError("KLDN needs positive standard deviations");
  }
  const double dm = mu_S - mu_A;
  const double v = std::log(sd_A / sd_S) + (sd_S * sd_S + dm * dm) / (2.0 * sd_A * sd_A) - 0.5;
  return std::max(v, 0.0);
}

double tail_probability(std::span<const double> predictive, double observed) {
  if (predictive.empty()) throw DomainError("tail probability of an empty sample");
  std::size_t below = 0;
  std::size_t above = 0;
  for (double v : predictive) {
    below += v <= observed ? 1 : 0;
    above += v >= observed ? 1 : 0;
  }
  const double denom = static_cast<double>(predictive.size() + 1);
  const double lower = static_cast<double>(below + 1) / denom;
  const double upper = static_cast<double>(above + 1) / denom;
  return std::min({lower, upper, 0.5});
}

namespace {

// Row index and simulation seed for predictive replicate r.
std::pair<Eigen::Index, std::uint64_t> replicate_draw(const Chain& chain,
                                                      std::uint64_t seed,
                                                      std::size_t r) {
  Rng rng(derive_seed(seed, r));
  const auto row = static_cast<Eigen::Index>(rng.below(chain.size()));
  return {row, rng.next_u64()};
}

}  // namespace

PpcReport posterior_predictive_check(const Chain& chain, const ModelSpec& model,
                                     const Vector& s_obs, std::size_t n,
                                     std::size_t n_rep, std::uint64_t seed,
                                     unsigned threads) {
  if (chain.size() == 0) throw DomainError("posterior predictive check of an empty chain");
  if (n_rep == 0) throw DomainError("posterior predictive check needs n_rep >= 1");
  const auto d = static_cast<Eigen::Index>(model.summary_dim());
  if (s_obs.size() != d) throw DomainError("observed summaries have the wrong dimension");
  Matrix reps(static_cast<Eigen::Index>(n_rep), d);
  parallel_for(n_rep, threads, [&](std::size_t r) {
    const auto [row, sim_seed] = replicate_draw(chain, seed, r);
    const Vector theta = chain.theta.row(row).transpose();
    const TimeSeries z = model.simulate(theta, n, sim_seed);
    reps.row(static_cast<Eigen::Index>(r)) = model.summarize(z.values()).transpose();
  });
  PpcReport out;
  for (Eigen::Index j = 0; j < d; ++j) {
    PpcSummary s;
    s.label = model.summary_labels[static_cast<std::size_t>(j)];
    s.observed = s_obs(j);
    s.predictive.resize(n_rep);
    for (std::size_t r = 0; r < n_rep; ++r) {
      s.predictive[r] = reps(static_cast<Eigen::Index>(r), j);
    }
    s.tail = tail_probability(s.predictive, s.observed);
    out.summaries.push_back(std::move(s));
  }
  return out;
}

BootVarReport bootstrap_variance_check(const TimeSeries& y, const Chain& chain,
                                       const ModelSpec& model, const BootstrapSpec& spec,
                                       std::size_t n_rep, std::uint64_t seed,
                                       double alpha, unsigned threads) {
  if (chain.size() == 0) throw DomainError("bootstrap variance check of an empty chain");
  if (n_rep == 0) throw DomainError("bootstrap variance check needs n_rep >= 1");
  const std::size_t n = y.size();
  const auto d = static_cast<Eigen::Index>(model.summary_dim());
  const Vector observed = block_bootstrap_cov(y, model.summarize, spec, threads).diagonal();
  Matrix reps(static_cast<Eigen::Index>(n_rep), d);
  parallel_for(n_rep, threads, [&](std::size_t r) {
    const auto [row, sim_seed] = replicate_draw(chain, seed, r);
    const Vector theta = chain.theta.row(row).transpose();
    const TimeSeries z = model.simulate(theta, n, sim_seed);
    BootstrapSpec rs = spec;
    rs.seed = derive_seed(sim_seed, "bootstrap");
    reps.row(static_cast<Eigen::Index>(r)) =
        block_bootstrap_cov(z, model.summarize, rs, 1).diagonal().transpose();
  });
  BootVarReport out;
  out.alpha = alpha;
  for (Eigen::Index j = 0; j < d; ++j) {
    BootVarSummary s;
    s.label = model.summary_labels[static_cast<std::size_t>(j)];
    s.observed = observed(j);
    s.predictive.resize(n_rep);
    for (std::size_t r = 0; r < n_rep; ++r) {
      s.predictive[r] = reps(static_cast<Eigen::Index>(r), j);
    }
    s.tail = tail_probability(s.predictive, s.observed);
    s.observed_below = s.observed < quantile_of(s.predictive, 0.5);
    s.flagged = s.tail < alpha;
    out.summaries.push_back(std::move(s));
  }
  return out;
}

std::vector<GammaDeparture> gamma_departure(const Chain& chain, double prior_mean) {
  if (!chain.has_gamma() || chain.size() == 0) {
    throw DomainError("gamma departure needs a chain with gamma draws");
  }
  std::vector<GammaDeparture> out;
  for (std::size_t j = 0; j < static_cast<std::size_t>(chain.gamma.cols()); ++j) {
    const std::vector<double> g = chain.gamma_column(j);
    const std::string label =
        j < chain.gamma_names.size() ? chain.gamma_names[j] : "gamma_" + std::to_string(j);
    out.push_back({j, label, ks_distance_exponential(g, prior_mean)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GammaDeparture& a, const GammaDeparture& b) { return a.ks > b.ks; });
  return out;
}

CoverageResult coverage_experiment(const CoverageConfig& cfg) {
  cfg.sv.validate();
  if (cfg.replications == 0) throw DomainError("coverage experiment needs replications >= 1");
  CoverageResult out;
  const std::size_t per_n = cfg.replications;
  out.replications.resize(cfg.ns.size() * per_n);
  parallel_for(out.replications.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t n = cfg.ns[k / per_n];
    const std::size_t r = k % per_n;
    CoverageReplication& rec = out.replications[k];
    rec.n = n;
    rec.rep = r;
    const std::string path = "coverage/n=" + std::to_string(n) + "/rep=" + std::to_string(r);
    rec.data_seed = derive_seed(cfg.seed, path + "/data");
    try {
      const TimeSeries y = simulate_sv(cfg.sv, n, rec.data_seed);
      AdjustConfig ac = cfg.adjust;
      ac.threads = 1;
      ac.draw_seed = derive_seed(cfg.seed, path + "/draws");
      ac.bootstrap.seed = derive_seed(cfg.seed, path + "/bootstrap");
      const AdjustmentReport rep = run_adjusted_pipeline(y, ac);
      rec.naive_mean = rep.naive_mean;
      rec.naive_var = rep.naive_var;
      rec.naive_covers = rep.naive_interval.contains(cfg.pseudo_true);
      rec.adjusted_mean = rep.adjusted_mean;
      rec.adjusted_var = rep.adjusted_var;
      rec.adjusted_covers = rep.adjusted_interval.contains(cfg.pseudo_true);
    } catch (const Error& e) {
      rec.error = e.kind() + ": " + e.what();
    }
  });

  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const std::size_t n = cfg.ns[ni];
    CoverageCell a{"a-BSL", n};
    CoverageCell b{"n-BSL", n};
    std::size_t ordered = 0;
    for (std::size_t r = 0; r < per_n; ++r) {
      const CoverageReplication& rec = out.replications[ni * per_n + r];
      if (!rec.error.empty()) {
        ++out.failures;
        continue;
      }
      a.mean_x1e3 += 1e3 * rec.adjusted_mean;
      a.var += rec.adjusted_var;
      a.coverage += rec.adjusted_covers ? 1.0 : 0.0;
      b.mean_x1e3 += 1e3 * rec.naive_mean;
      b.var += rec.naive_var;
      b.coverage += rec.naive_covers ? 1.0 : 0.0;
      ordered += rec.adjusted_var < rec.naive_var ? 1 : 0;
      ++a.ok;
      ++b.ok;
    }
    for (CoverageCell* c : {&a, &b}) {
      if (c->ok == 0) continue;
      const double k = static_cast<double>(c->ok);
      c->mean_x1e3 /= k;
      c->var /= k;
      c->coverage /= k;
    }
    out.cells.push_back(a);
    out.cells.push_back(b);
    out.var_order_fraction.emplace_back(
        n, a.ok == 0 ? 0.0 : static_cast<double>(ordered) / static_cast<double>(a.ok));
  }
  return out;
}

}  // namespace bslmis
