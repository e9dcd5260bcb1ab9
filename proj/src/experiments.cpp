#include "bslmis/experiments.hpp"

#include "bslmis/adjust.hpp"
#include "bslmis/asymptotics.hpp"
#include "bslmis/diagnostics.hpp"
#include "bslmis/io.hpp"
#include "bslmis/linalg.hpp"
#include "bslmis/models.hpp"
#include "bslmis/parallel.hpp"
#include "bslmis/posterior.hpp"
#include "bslmis/rng.hpp"
#include "bslmis/stats.hpp"
#include "bslmis/summaries.hpp"
#include "bslmis/synthlik.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

namespace bslmis {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::size_t kLags[] = {0, 1};
constexpr double kInf = std::numeric_limits<double>::infinity();

using Defaults = std::map<std::string, std::string>;

// Collects artifact files in write order.
struct Sink {
  fs::path dir;
  std::vector<std::string>& names;

  void csv(const std::string& name, const CsvTable& t) {
    write_csv(dir / name, t);
    names.push_back(name);
  }
};

// Finite doubles as numbers, the rest as strings, so summary.json stays valid.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

std::string tag(double x) { return format_double(x); }

SvParams sv_from(const Config& c) {
  SvParams p{c.get_double("sv.omega"), c.get_double("sv.rho"), c.get_double("sv.sigma_v")};
  p.validate();
  return p;
}

std::vector<double> grid_from(const Config& c) {
  const double lim = c.get_double("grid.limit");
  if (!(lim > 0.0 && lim < 1.0)) throw ConfigError("grid.limit must lie in (0, 1)", "grid.limit");
  return linspace(-lim, lim, c.get_size("grid.points"));
}

unsigned threads_from(const Config& c) {
  const std::size_t t = c.get_size("threads");
  return t == 0 ? 1u : static_cast<unsigned>(t);
}

GammaForm gamma_form_from(const Config& c) {
  try {
    return parse_gamma_form(c.get("gamma_form"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), "gamma_form");
  }
}

double flat_ma1(double t) { return (t > -1.0 && t < 1.0) ? 0.0 : -kInf; }

Vector autocov01(const TimeSeries& y) { return autocov_values(y.values(), kLags); }

TimeSeries prefix(const TimeSeries& y, std::size_t n) {
  if (n > y.size()) throw DomainError("prefix longer than the series");
  const auto v = y.values();
  return TimeSeries(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)),
                    y.seed());
}

GridPosterior exact_posterior(const Vector& s, std::size_t n, std::vector<double> grid,
                              unsigned threads) {
  return grid_posterior([&](double t) { return ma1_exact_loglik(t, s, n); }, flat_ma1,
                        std::move(grid), threads);
}

// Seed of the r-th SV dataset; shared by exact-posterior, temper and
// abc-contrast so their criteria see the same data.
std::uint64_t sv_seed(std::uint64_t master, std::size_t r) {
  return derive_seed(master, "sv/rep=" + std::to_string(r));
}

// Score functions are defined on |theta| < 0.999; root searches skip the rim.
std::vector<double> interior(std::span<const double> grid) {
  std::vector<double> out;
  for (double t : grid) {
    if (std::abs(t) < 0.998) out.push_back(t);
  }
  return out;
}

json modes_json(const GridPosterior& post, const std::vector<std::size_t>& idx) {
  json a = json::array();
  for (std::size_t i : idx) {
    a.push_back({{"cell", i},
                 {"theta", post.grid[i]},
                 {"boundary", i == 0 || i + 1 == post.size()}});
  }
  return a;
}

// Local-shape check at every local-max root of the limit score with b0 = s.
json shape_checks(const GridPosterior& post, const Vector& s, std::size_t n,
                  std::span<const double> grid, LongTable& table, const std::string& method) {
  json out = json::array();
  const RootSet roots =
      find_roots([&](double t) { return ma1_limit_score(t, s); }, interior(grid));
  for (const Root& r : roots.roots) {
    if (!r.is_local_max) continue;
    json j{{"root", r.theta}, {"hessian", r.hessian}};
    // At a bifurcation the curvature vanishes and the local shape is not Gaussian.
    if (r.hessian > -1e-4) {
      j["error"] = "degenerate curvature";
      out.push_back(j);
      continue;
    }
    try {
      const double delta = -1.0 / r.hessian;
      const double window = 3.0 * std::sqrt(delta / static_cast<double>(n));
      const ShapeCheck sc = local_shape_check(post, r.theta, window, n, r.hessian);
      j["delta"] = sc.delta;
      j["delta_hat"] = sc.delta_hat;
      j["discrepancy"] = sc.discrepancy;
      j["points"] = sc.points;
      table.add("shape", method, n, "root", r.theta);
      table.add("shape", method, n, "delta", sc.delta);
      table.add("shape", method, n, "delta_hat", sc.delta_hat);
      table.add("shape", method, n, "discrepancy", sc.discrepancy);
    } catch (const InsufficientResolutionError& e) {
      j["error"] = e.what();
    }
    out.push_back(j);
  }
  return out;
}

// ---- simulate ---------------------------------------------------------------

Defaults simulate_defaults() {
  return {{"model", "sv"},   {"n", "1000"},        {"ma1.theta", "0.5"},
          {"sv.omega", "-0.736"}, {"sv.rho", "0.9"}, {"sv.sigma_v", "0.36"},
          {"gk.A", "0"},     {"gk.B", "0.5"},      {"gk.g", "1"},
          {"gk.k", "0.5"}};
}

json run_simulate(const Config& c, Sink& sink) {
  const std::string model = c.get("model");
  const std::size_t n = c.get_size("n");
  const std::uint64_t seed = derive_seed(c.get_u64("seed"), "simulate/data");
  std::optional<TimeSeries> y;
  SummaryVec s;
  if (model == "ma1") {
    y = simulate_ma1(Ma1Params{c.get_double("ma1.theta")}, n, seed);
    s = autocov_summaries(*y, kLags);
  } else if (model == "sv") {
    y = simulate_sv(sv_from(c), n, seed);
    s = autocov_summaries(*y, kLags);
  } else if (model == "gk") {
    y = simulate_gk(GkParams{c.get_double("gk.A"), c.get_double("gk.B"), c.get_double("gk.g"),
                             c.get_double("gk.k")},
                    n, seed);
    s = gk_summaries(*y, n >= 100);
  } else {
    throw ConfigError("model must be ma1, sv or gk", "model");
  }
  CsvTable series{{"t", "y"}, {}};
  for (std::size_t t = 0; t < y->size(); ++t) {
    series.rows.push_back({std::to_string(t + 1), format_double((*y)[t])});
  }
  sink.csv("series.csv", series);
  CsvTable st{{"summary", "value"}, {}};
  json js;
  for (std::size_t j = 0; j < s.dim(); ++j) {
    st.rows.push_back({s.labels[j], format_double(s.values(static_cast<Eigen::Index>(j)))});
    js[s.labels[j]] = s.values(static_cast<Eigen::Index>(j));
  }
  sink.csv("summaries.csv", st);
  return {{"model", model}, {"n", n}, {"summaries", js}};
}

// ---- exact-posterior --------------------------------------------------------

Defaults exact_defaults() {
  return {{"source", "fixed"},
          {"s0", "0.01,0.1,0.25,0.5,0.75,0.99"},
          {"s1", "0"},
          {"ns", "100,500,1000"},
          {"replications", "50"},
          {"write_curves", "50"},
          {"central", "0.2"},
          {"mode.rel_height", "0.001"},
          {"grid.points", "2001"},
          {"grid.limit", "0.999"},
          {"sv.omega", "-0.736"},
          {"sv.rho", "0.9"},
          {"sv.sigma_v", "0.36"}};
}

json run_exact_posterior(const Config& c, Sink& sink) {
  const std::vector<std::size_t> ns = c.get_sizes("ns");
  const std::vector<double> grid = grid_from(c);
  const unsigned threads = threads_from(c);
  const double central = c.get_double("central");
  const double rel = c.get_double("mode.rel_height");
  LongTable table;
  json out;
  const std::string source = c.get("source");
  if (source == "fixed") {
    json cells = json::array();
    for (double s0 : c.get_doubles("s0")) {
      Vector s(2);
      s << s0, c.get_double("s1");
      CsvTable curve{{"n", "theta", "density", "log_unnorm"}, {}};
      const std::string method = "s0=" + tag(s0);
      for (std::size_t n : ns) {
        const GridPosterior post = exact_posterior(s, n, grid, threads);
        for (const auto& row : grid_posterior_table(post).rows) {
          curve.rows.push_back({std::to_string(n), row[0], row[1], row[2]});
        }
        const auto modes = posterior_modes(post, rel);
        table.add("exact-posterior", method, n, "mode_count", static_cast<double>(modes.size()));
        for (std::size_t k = 0; k < modes.size(); ++k) {
          table.add("exact-posterior", method, n, "mode_" + std::to_string(k + 1),
                    post.grid[modes[k]]);
        }
        const double mass = post.mass_between(-central, central);
        table.add("exact-posterior", method, n, "mass_central", mass);
        cells.push_back({{"s0", s0},
                         {"s1", s(1)},
                         {"n", n},
                         {"grid_size", post.size()},
                         {"grid_step", grid[1] - grid[0]},
                         {"modes", modes_json(post, modes)},
                         {"mass_central", mass},
                         {"shape", shape_checks(post, s, n, grid, table, method)}});
      }
      sink.csv("posterior_s0=" + tag(s0) + ".csv", curve);
    }
    out["cells"] = cells;
  } else if (source == "sv") {
    const SvParams sv = sv_from(c);
    const std::size_t reps = c.get_size("replications");
    const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
    const std::size_t write_curves = c.get_size("write_curves");
    json rows = json::array();
    std::map<std::size_t, std::size_t> hits;
    for (std::size_t r = 0; r < reps; ++r) {
      const TimeSeries full = simulate_sv(sv, n_max, sv_seed(c.get_u64("seed"), r));
      CsvTable curve{{"n", "theta", "density", "log_unnorm"}, {}};
      for (std::size_t n : ns) {
        const Vector s = autocov01(prefix(full, n));
        const GridPosterior post = exact_posterior(s, n, grid, threads);
        const auto modes = posterior_modes(post, rel);
        const double mass = post.mass_between(-central, central);
        const bool ok = modes.size() == 2 && mass < 0.1;
        hits[n] += ok ? 1 : 0;
        const std::string method = "rep=" + std::to_string(r);
        table.add("exact-posterior", method, n, "mode_count", static_cast<double>(modes.size()));
        table.add("exact-posterior", method, n, "mass_central", mass);
        rows.push_back({{"rep", r},
                        {"n", n},
                        {"s0", s(0)},
                        {"s1", s(1)},
                        {"modes", modes_json(post, modes)},
                        {"mass_central", mass},
                        {"bimodal_low_central", ok}});
        if (r < write_curves) {
          for (const auto& row : grid_posterior_table(post).rows) {
            curve.rows.push_back({std::to_string(n), row[0], row[1], row[2]});
          }
        }
      }
      if (r < write_curves) sink.csv("posterior_rep=" + std::to_string(r) + ".csv", curve);
    }
    json frac;
    for (std::size_t n : ns) {
      frac[std::to_string(n)] = static_cast<double>(hits[n]) / static_cast<double>(reps);
    }
    out["replications"] = rows;
    out["fraction_bimodal_low_central"] = frac;
  } else {
    throw ConfigError("source must be fixed or sv", "source");
  }
  sink.csv("modes.csv", table.table);
  out["source"] = source;
  return out;
}

// ---- temper -----------------------------------------------------------------

Defaults temper_defaults() {
  return {{"alpha", "0.5"},        {"n", "1000"},          {"replications", "50"},
          {"write_curves", "3"},   {"grid.points", "2001"}, {"grid.limit", "0.999"},
          {"sv.omega", "-0.736"},  {"sv.rho", "0.9"},       {"sv.sigma_v", "0.36"}};
}

json run_temper(const Config& c, Sink& sink) {
  const double alpha = c.get_double("alpha");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive", "alpha");
  const std::size_t n = c.get_size("n");
  const std::size_t reps = c.get_size("replications");
  const std::vector<double> grid = grid_from(c);
  const unsigned threads = threads_from(c);
  const SvParams sv = sv_from(c);
  LongTable table;
  json rows = json::array();
  bool all_identical = true;
  for (std::size_t r = 0; r < reps; ++r) {
    const Vector s = autocov01(simulate_sv(sv, n, sv_seed(c.get_u64("seed"), r)));
    auto ll = [&](double t) { return ma1_exact_loglik(t, s, n); };
    const GridPosterior plain = grid_posterior(ll, flat_ma1, grid, threads);
    const GridPosterior tempered = grid_posterior(
        [&](double t) { return temper_logpdf(ll(t), alpha); }, flat_ma1, grid, threads);
    const auto a = argmax_cells(plain);
    const auto b = argmax_cells(tempered);
    const bool same = a == b;
    all_identical = all_identical && same;
    const std::string method = "rep=" + std::to_string(r);
    table.add("temper", method, n, "argmax_count_untempered", static_cast<double>(a.size()));
    table.add("temper", method, n, "argmax_count_tempered", static_cast<double>(b.size()));
    table.add("temper", method, n, "identical", same ? 1.0 : 0.0);
    rows.push_back({{"rep", r}, {"cells_untempered", a}, {"cells_tempered", b}, {"identical", same}});
    if (r < c.get_size("write_curves")) {
      CsvTable curve{{"alpha", "theta", "density", "log_unnorm"}, {}};
      for (const auto& [al, post] : {std::pair{1.0, &plain}, std::pair{alpha, &tempered}}) {
        for (const auto& row : grid_posterior_table(*post).rows) {
          curve.rows.push_back({tag(al), row[0], row[1], row[2]});
        }
      }
      sink.csv("temper_rep=" + std::to_string(r) + ".csv", curve);
    }
  }
  sink.csv("temper.csv", table.table);
  return {{"alpha", alpha}, {"n", n}, {"replications", rows}, {"all_identical", all_identical}};
}

// ---- rbsl -------------------------------------------------------------------

Defaults rbsl_defaults() {
  return {{"ns", "100,500,1000"},   {"m", "10"},
          {"iterations", "50000"},  {"burn_in", "0"},
          {"theta0", "0"},          {"proposal_sd", "0.1"},
          {"adapt", "false"},       {"gamma_prior_mean", "0.5"},
          {"gamma_proposal_sd", "1"}, {"gamma_form", "diag-scale"}, {"sv.omega", "-0.736"},
          {"sv.rho", "0.9"},        {"sv.sigma_v", "0.36"}};
}

LogPriorFn flat_prior_ma1() {
  return [](const Vector& t) { return flat_ma1(t(0)); };
}

json run_rbsl(const Config& c, Sink& sink) {
  const SvParams sv = sv_from(c);
  const std::uint64_t master = c.get_u64("seed");
  LongTable table;
  json runs = json::array();
  for (std::size_t n : c.get_sizes("ns")) {
    const std::string path = "rbsl/n=" + std::to_string(n);
    const TimeSeries y = simulate_sv(sv, n, derive_seed(master, path + "/data"));
    BslTarget target{ma1_model(), flat_prior_ma1(), autocov01(y), n, c.get_size("m"),
                     threads_from(c), std::nullopt};
    McmcConfig mc;
    mc.n_iter = c.get_size("iterations");
    mc.burn_in = c.get_size("burn_in");
    mc.theta0 = Vector::Constant(1, c.get_double("theta0"));
    mc.proposal_sd = Vector::Constant(1, c.get_double("proposal_sd"));
    mc.adapt = c.get_bool("adapt");
    mc.gamma_prior_mean = c.get_double("gamma_prior_mean");
    mc.gamma_proposal_sd = c.get_double("gamma_proposal_sd");
    mc.gamma_form = gamma_form_from(c);
    const Chain chain = rbsl_mh(target, mc, derive_seed(master, path + "/chain"));
    sink.csv("chain_n=" + std::to_string(n) + ".csv", chain_table(chain));
    const std::vector<double> th = chain.column(0);
    const double mean = mean_of(th);
    // Sticky pseudo-marginal runs make an iid bandwidth resolve single
    // repeated values as modes; size the bandwidth by the effective sample.
    const double ess = effective_sample_size(th);
    const std::size_t modes = kde_mode_count(th, 0.1, 512, ess);
    table.add("rbsl", "r-BSL", n, "mean", mean);
    table.add("rbsl", "r-BSL", n, "sd", sd_of(th));
    table.add("rbsl", "r-BSL", n, "kde_modes", static_cast<double>(modes));
    table.add("rbsl", "r-BSL", n, "ess", ess);
    table.add("rbsl", "r-BSL", n, "acceptance", chain.acceptance_rate);
    json gam = json::array();
    for (const auto& g : gamma_departure(chain, mc.gamma_prior_mean)) {
      gam.push_back({{"label", g.label}, {"ks", g.ks}});
      table.add("rbsl", "r-BSL", n, "ks_" + g.label, g.ks);
    }
    runs.push_back({{"n", n},
                    {"s_obs", {target.s_obs(0), target.s_obs(1)}},
                    {"mean", mean},
                    {"sd", sd_of(th)},
                    {"kde_modes", modes},
                    {"ess", ess},
                    {"acceptance", num(chain.acceptance_rate)},
                    {"gamma_acceptance", num(chain.gamma_acceptance_rate)},
                    {"gamma_departure", gam}});
  }
  sink.csv("rbsl_summary.csv", table.table);
  return {{"runs", runs}};
}

// ---- adjust -----------------------------------------------------------------

Defaults adjust_defaults() {
  return {{"ns", "100,1000"},
          {"replications", "100"},
          {"pseudo_true", "0"},
          {"n_draws", "10000"},
          {"level", "0.95"},
          {"literal", "false"},
          {"bootstrap.block_len", "10"},
          {"bootstrap.n_boot", "1000"},
          {"grid.points", "2001"},
          {"grid.limit", "0.999"},
          {"sv.omega", "-0.736"},
          {"sv.rho", "0.9"},
          {"sv.sigma_v", "0.36"}};
}

json run_adjust(const Config& c, Sink& sink, std::size_t& failures) {
  CoverageConfig cc;
  cc.ns = c.get_sizes("ns");
  cc.replications = c.get_size("replications");
  cc.sv = sv_from(c);
  cc.pseudo_true = c.get_double("pseudo_true");
  cc.adjust.grid = grid_from(c);
  cc.adjust.n_draws = c.get_size("n_draws");
  cc.adjust.level = c.get_double("level");
  cc.adjust.literal = c.get_bool("literal");
  cc.adjust.bootstrap.block_len = c.get_size("bootstrap.block_len");
  cc.adjust.bootstrap.n_boot = c.get_size("bootstrap.n_boot");
  cc.seed = c.get_u64("seed");
  cc.threads = threads_from(c);
  const CoverageResult res = coverage_experiment(cc);
  failures = res.failures;

  CsvTable t1{{"method", "n", "mean_x1e3", "var", "cov", "ok"}, {}};
  LongTable table;
  json cells = json::array();
  for (const CoverageCell& cell : res.cells) {
    t1.rows.push_back({cell.method, std::to_string(cell.n), format_double(cell.mean_x1e3),
                       format_double(cell.var), format_double(cell.coverage),
                       std::to_string(cell.ok)});
    table.add("adjust", cell.method, cell.n, "mean_x1e3", cell.mean_x1e3);
    table.add("adjust", cell.method, cell.n, "var", cell.var);
    table.add("adjust", cell.method, cell.n, "cov", cell.coverage);
    cells.push_back({{"method", cell.method},
                     {"n", cell.n},
                     {"mean_x1e3", cell.mean_x1e3},
                     {"var", cell.var},
                     {"coverage", cell.coverage},
                     {"ok", cell.ok}});
  }
  json order;
  for (const auto& [n, f] : res.var_order_fraction) {
    table.add("adjust", "a-BSL<n-BSL", n, "var_order_fraction", f);
    order[std::to_string(n)] = f;
  }
  CsvTable reps{{"n", "rep", "data_seed", "naive_mean", "naive_var", "naive_covers",
                 "adjusted_mean", "adjusted_var", "adjusted_covers", "error"},
                {}};
  for (const CoverageReplication& r : res.replications) {
    reps.rows.push_back({std::to_string(r.n), std::to_string(r.rep), std::to_string(r.data_seed),
                         format_double(r.naive_mean), format_double(r.naive_var),
                         r.naive_covers ? "1" : "0", format_double(r.adjusted_mean),
                         format_double(r.adjusted_var), r.adjusted_covers ? "1" : "0",
                         r.error});
  }
  sink.csv("adjust_table.csv", t1);
  sink.csv("replications.csv", reps);
  sink.csv("adjust_long.csv", table.table);
  return {{"cells", cells}, {"var_order_fraction", order}, {"failures", res.failures}};
}

// ---- hessian-scan -----------------------------------------------------------

Defaults hessian_defaults() {
  return {{"s0", "0.1,0.5,0.99"}, {"s1", "0"},          {"n", "1000"},
          {"grid.points", "1999"}, {"grid.limit", "0.99"}};
}

json run_hessian_scan(const Config& c, Sink& sink) {
  const std::size_t n = c.get_size("n");
  const std::vector<double> grid = grid_from(c);
  LongTable table;
  json out = json::array();
  for (double s0 : c.get_doubles("s0")) {
    Vector s(2);
    s << s0, c.get_double("s1");
    const auto rows = hessian_scan(s, n, grid);
    CsvTable t{{"theta", "loglik", "score", "hessian", "limit_score", "limit_hessian", "is_mode"},
               {}};
    json modes = json::array();
    for (const HessianScanRow& r : rows) {
      t.rows.push_back({format_double(r.theta), format_double(r.loglik), format_double(r.score),
                        format_double(r.hessian), format_double(ma1_limit_score(r.theta, s)),
                        format_double(ma1_limit_hessian(r.theta, s)), r.is_mode ? "1" : "0"});
      if (r.is_mode) modes.push_back(r.theta);
    }
    sink.csv("hessian_scan_s0=" + tag(s0) + ".csv", t);
    const RootSet roots = find_roots([&](double th) { return ma1_score(th, s, n); }, grid);
    json rj = json::array();
    const std::string method = "s0=" + tag(s0);
    for (const Root& r : roots.roots) {
      rj.push_back({{"theta", r.theta}, {"hessian", r.hessian}, {"local_max", r.is_local_max}});
      table.add("hessian-scan", method, n, r.is_local_max ? "root_max" : "root_other", r.theta);
    }
    out.push_back({{"s0", s0}, {"modes", modes}, {"roots", rj}});
  }
  sink.csv("roots.csv", table.table);
  return {{"n", n}, {"scans", out}};
}

// ---- gk ---------------------------------------------------------------------

Defaults gk_defaults() {
  return {{"data.source", "simulate"},
          {"data.path", ""},
          {"data.column", "r"},
          {"data.log_returns", "false"},
          {"n", "1000"},
          {"gk.A", "0"},
          {"gk.B", "0.5"},
          {"gk.g", "1"},
          {"gk.k", "0.5"},
          {"fit.k", "0"},
          {"m", "50"},
          {"m_standard", "200"},
          {"iterations", "3000"},
          {"burn_in", "1000"},
          {"fit.m", "200"},
          {"cov.m", "2000"},
          {"grad.m", "2000"},
          {"ppc.replicates", "1000"},
          {"bootvar.replicates", "100"},
          {"bootvar.n_boot", "200"},
          {"bootvar.alpha", "0.01"},
          {"bootstrap.block_len", "10"},
          {"bootstrap.n_boot", "1000"},
          {"gamma_prior_mean", "0.5"},
          {"gamma_form", "diag-scale"}};
}

LogPriorFn gk_prior(const ModelSpec& model) {
  return [model](const Vector& t) { return model.in_support(t) ? 0.0 : -kInf; };
}

Vector gk_start(const Vector& s) {
  Vector t(3);
  t << std::clamp(s(0), -1.0, 1.0), std::clamp(s(1) / 1.349, 1e-3, 1.0), 0.0;
  return t;
}

std::vector<double> column_of(const Matrix& m, Eigen::Index j) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, j);
  return v;
}

CsvTable ppc_table(const PpcReport& r) {
  CsvTable t;
  t.header.push_back("rep");
  for (const auto& s : r.summaries) t.header.push_back(s.label);
  const std::size_t reps = r.summaries.front().predictive.size();
  for (std::size_t i = 0; i < reps; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (const auto& s : r.summaries) row.push_back(format_double(s.predictive[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

json ppc_json(const PpcReport& r, const std::string& method, std::size_t n, LongTable& table) {
  json o;
  for (const auto& s : r.summaries) {
    o[s.label] = {{"observed", s.observed}, {"tail", s.tail}};
    table.add("ppc", method, n, "observed_" + s.label, s.observed);
    table.add("ppc", method, n, "tail_" + s.label, s.tail);
  }
  return o;
}

struct GkRun {
  std::string name;  // "S1" or "S2"
  ModelSpec model;
  Vector s_obs;
  SlFit fit;
  Chain standard;
};

json run_gk(const Config& c, Sink& sink) {
  const std::uint64_t master = c.get_u64("seed");
  const unsigned threads = threads_from(c);
  auto seed_of = [&](const std::string& p) { return derive_seed(master, "gk/" + p); };

  const std::string source = c.get("data.source");
  const TimeSeries y = [&] {
    if (source == "simulate") {
      return simulate_gk(GkParams{c.get_double("gk.A"), c.get_double("gk.B"), c.get_double("gk.g"),
                             c.get_double("gk.k")},
                         c.get_size("n"), seed_of("data"));
    }
    if (source == "csv") {
      c.require("data.path");
      return ingest_returns(c.get("data.path"), c.get("data.column"),
                            c.get_bool("data.log_returns"), 100);
    }
    throw ConfigError("data.source must be simulate or csv", "data.source");
  }();
  const std::size_t n = y.size();
  const double k_fit = c.get_double("fit.k");
  const double gamma_mean = c.get_double("gamma_prior_mean");
  const std::size_t p = 3;
  const double rw = 2.38 * 2.38 / static_cast<double>(p);

  BootstrapSpec boot;
  boot.block_len = c.get_size("bootstrap.block_len");
  boot.n_boot = c.get_size("bootstrap.n_boot");
  boot.seed = seed_of("bootstrap");

  auto mcmc = [&](const SlFit& fit) {
    McmcConfig mc;
    mc.n_iter = c.get_size("iterations");
    mc.burn_in = c.get_size("burn_in");
    mc.theta0 = fit.theta;
    mc.proposal_sd = Vector::Constant(static_cast<Eigen::Index>(p), 0.05);
    mc.proposal_cov = Matrix(rw * fit.laplace_cov);
    mc.gamma_prior_mean = gamma_mean;
    mc.gamma_form = gamma_form_from(c);
    return mc;
  };

  LongTable table;
  json out;
  out["n"] = n;
  out["source"] = source;
  std::vector<GkRun> runs;
  for (int tail = 0; tail < 2; ++tail) {
    GkRun run;
    run.name = tail == 0 ? "S1" : "S2";
    run.model = gk_fixed_k_model(k_fit, tail == 1);
    run.s_obs = run.model.summarize(y.values());
    run.fit = fit_sl_gauss_newton(run.model, run.s_obs, gk_start(run.s_obs), c.get_size("fit.m"),
                                  n, seed_of("fit/" + run.name), 30, threads);
    BslTarget target{run.model, gk_prior(run.model), run.s_obs, n, c.get_size("m_standard"),
                     threads, std::nullopt};
    run.standard = bsl_rwmh(target, mcmc(run.fit), seed_of("standard/" + run.name));
    sink.csv("chain_standard_" + run.name + ".csv", chain_table(run.standard));
    runs.push_back(std::move(run));
  }

  // Adjusted BSL with the SL covariance fixed at the standard posterior mean.
  for (GkRun& run : runs) {
    const std::string method = "standard-" + run.name;
    Vector mu(static_cast<Eigen::Index>(p));
    Vector sd(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
      const auto col = run.standard.column(j);
      mu(static_cast<Eigen::Index>(j)) = mean_of(col);
      sd(static_cast<Eigen::Index>(j)) = sd_of(col);
    }
    const SynthLikEstimate fixed =
        estimate_sl(run.model, mu, c.get_size("cov.m"), n, seed_of("cov/" + run.name), threads);
    BslTarget naive_target{run.model, gk_prior(run.model), run.s_obs, n, c.get_size("m"),
                           threads, fixed.cov};
    McmcConfig nc = mcmc(run.fit);
    nc.theta0 = run.model.in_support(mu) ? mu : run.fit.theta;
    const Chain naive = bsl_rwmh(naive_target, nc, seed_of("naive/" + run.name));
    sink.csv("chain_naive_" + run.name + ".csv", chain_table(naive));

    Vector theta_bar(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
      theta_bar(static_cast<Eigen::Index>(j)) = mean_of(naive.column(j));
    }
    const Matrix omega = sample_cov(naive.theta);
    const Matrix G = estimate_mean_gradient(run.model, theta_bar, c.get_size("grad.m"), n,
                                            seed_of("grad/" + run.name), threads);
    BootstrapSpec b = boot;
    b.seed = seed_of("bootstrap/" + run.name);
    const Matrix W = estimate_W(y, run.model.summarize, theta_bar,
                                [&G](const Vector&) { return G; }, fixed.cov, b, threads);
    AdjustOptions opt;
    opt.n_scale = static_cast<double>(n);
    const AdjustedDraws adj = adjust_draws(naive.theta, theta_bar, omega, W, opt);
    CsvTable draws;
    draws.header = run.model.param_names;
    for (Eigen::Index i = 0; i < adj.draws.rows(); ++i) {
      std::vector<std::string> row;
      for (Eigen::Index j = 0; j < adj.draws.cols(); ++j) row.push_back(format_double(adj.draws(i, j)));
      draws.rows.push_back(std::move(row));
    }
    sink.csv("adjusted_" + run.name + ".csv", draws);

    json kl;
    for (std::size_t j = 0; j < p; ++j) {
      const auto a = column_of(adj.draws, static_cast<Eigen::Index>(j));
      const auto jj = static_cast<Eigen::Index>(j);
      const double v = kldn(mu(jj), sd(jj), mean_of(a), sd_of(a));
      const std::string& name = run.model.param_names[j];
      kl[name] = {{"mu_S", mu(jj)}, {"sd_S", sd(jj)}, {"mu_A", mean_of(a)}, {"sd_A", sd_of(a)},
                  {"kldn", v}};
      table.add("kldn", run.name, n, name, v);
    }
    out["kldn"][run.name] = kl;

    const PpcReport ppc = posterior_predictive_check(run.standard, run.model, run.s_obs, n,
                                                     c.get_size("ppc.replicates"),
                                                     seed_of("ppc/standard/" + run.name), threads);
    sink.csv("ppc_standard_" + run.name + ".csv", ppc_table(ppc));
    out["ppc"][method] = ppc_json(ppc, method, n, table);
    out["standard"][run.name] = {{"acceptance", num(run.standard.acceptance_rate)},
                                 {"fit_theta", {run.fit.theta(0), run.fit.theta(1), run.fit.theta(2)}},
                                 {"fit_objective", run.fit.objective},
                                 {"mean", {mu(0), mu(1), mu(2)}},
                                 {"sd", {sd(0), sd(1), sd(2)}}};
  }

  // Bootstrap variance check for the misspecified standard fit.
  const GkRun& s2 = runs[1];
  BootstrapSpec bv = boot;
  bv.n_boot = c.get_size("bootvar.n_boot");
  bv.seed = seed_of("bootvar/data");
  const BootVarReport bvr = bootstrap_variance_check(
      y, s2.standard, s2.model, bv, c.get_size("bootvar.replicates"), seed_of("bootvar/reps"),
      c.get_double("bootvar.alpha"), threads);
  CsvTable bvt{{"summary", "observed", "tail", "observed_below_median", "flagged"}, {}};
  for (const auto& s : bvr.summaries) {
    bvt.rows.push_back({s.label, format_double(s.observed), format_double(s.tail),
                        s.observed_below ? "1" : "0", s.flagged ? "1" : "0"});
    out["bootvar"][s.label] = {{"observed", s.observed},
                               {"tail", s.tail},
                               {"observed_below_median", s.observed_below},
                               {"flagged", s.flagged}};
  }
  sink.csv("bootvar_standard_S2.csv", bvt);

  // Robust BSL on S2.
  BslTarget rt{s2.model, gk_prior(s2.model), s2.s_obs, n, c.get_size("m"), threads, std::nullopt};
  const Chain rb = rbsl_mh(rt, mcmc(s2.fit), seed_of("rbsl/S2"));
  sink.csv("chain_rbsl_S2.csv", chain_table(rb));
  const PpcReport rppc = posterior_predictive_check(rb, s2.model, s2.s_obs, n,
                                                    c.get_size("ppc.replicates"),
                                                    seed_of("ppc/rbsl/S2"), threads);
  sink.csv("ppc_rbsl_S2.csv", ppc_table(rppc));
  out["ppc"]["rbsl-S2"] = ppc_json(rppc, "rbsl-S2", n, table);
  CsvTable gd{{"gamma", "ks"}, {}};
  json gj = json::array();
  for (const auto& g : gamma_departure(rb, gamma_mean)) {
    gd.rows.push_back({g.label, format_double(g.ks)});
    gj.push_back({{"label", g.label}, {"index", g.index}, {"ks", g.ks}});
  }
  sink.csv("gamma_departure.csv", gd);
  json rmean = json::array();
  for (std::size_t j = 0; j < p; ++j) rmean.push_back(mean_of(rb.column(j)));
  out["rbsl"] = {{"acceptance", num(rb.acceptance_rate)},
                 {"gamma_acceptance", num(rb.gamma_acceptance_rate)},
                 {"mean", rmean},
                 {"gamma_departure", gj}};
  CsvTable obs{{"summary", "value"}, {}};
  for (std::size_t j = 0; j < s2.model.summary_dim(); ++j) {
    obs.rows.push_back({s2.model.summary_labels[j],
                        format_double(s2.s_obs(static_cast<Eigen::Index>(j)))});
  }
  sink.csv("observed_summaries.csv", obs);
  sink.csv("gk_summary.csv", table.table);
  return out;
}

// ---- abc-contrast -----------------------------------------------------------

Defaults abc_defaults() {
  return {{"n", "1000"},          {"sims", "100000"},     {"keep_frac", "0.005"},
          {"grid.points", "2001"}, {"grid.limit", "0.999"}, {"mode.rel_height", "0.001"},
          {"sv.omega", "-0.736"},  {"sv.rho", "0.9"},       {"sv.sigma_v", "0.36"}};
}

json run_abc(const Config& c, Sink& sink) {
  const std::size_t n = c.get_size("n");
  const std::uint64_t master = c.get_u64("seed");
  const unsigned threads = threads_from(c);
  const Vector s = autocov01(simulate_sv(sv_from(c), n, sv_seed(master, 0)));
  const PriorSampler prior = [](Rng& rng) {
    return Vector::Constant(1, -1.0 + 2.0 * rng.uniform());
  };
  const AbcResult abc = rejection_abc(ma1_model(), prior, s, n, c.get_size("sims"),
                                      c.get_double("keep_frac"),
                                      derive_seed(master, "abc/sims"), threads);
  CsvTable at{{"theta", "distance"}, {}};
  for (Eigen::Index i = 0; i < abc.draws.rows(); ++i) {
    at.rows.push_back({format_double(abc.draws(i, 0)),
                       format_double(abc.distances[static_cast<std::size_t>(i)])});
  }
  sink.csv("abc.csv", at);
  const GridPosterior post = exact_posterior(s, n, grid_from(c), threads);
  sink.csv("exact_posterior.csv", grid_posterior_table(post));
  const auto draws = column_of(abc.draws, 0);
  const auto modes = posterior_modes(post, c.get_double("mode.rel_height"));
  LongTable table;
  table.add("abc-contrast", "abc", n, "mean", mean_of(draws));
  table.add("abc-contrast", "abc", n, "kde_modes", static_cast<double>(kde_mode_count(draws)));
  table.add("abc-contrast", "exact-bsl", n, "mode_count", static_cast<double>(modes.size()));
  sink.csv("abc_summary.csv", table.table);
  return {{"n", n},
          {"s_obs", {s(0), s(1)}},
          {"accepted", draws.size()},
          {"threshold", abc.threshold},
          {"abc_mean", mean_of(draws)},
          {"abc_sd", sd_of(draws)},
          {"abc_kde_modes", kde_mode_count(draws)},
          {"exact_modes", modes_json(post, modes)}};
}

// ---- bvm-check --------------------------------------------------------------

Defaults bvm_defaults() {
  return {{"suites", "score,roots,bvm_rate,sandwich,sl"},
          {"score.s0", "0.5,1.2,1"},
          {"score.s1", "0,0.3,0.45"},
          {"score.n", "1000,500,200"},
          {"score.points", "99"},
          {"score.limit", "0.98"},
          {"roots.s0", "0.25,0.99"},
          {"roots.n", "1000"},
          {"roots.brute_points", "100000"},
          {"bvm_rate.theta", "0.3"},
          {"bvm_rate.ns", "500,1000,4000"},
          {"sandwich.replications", "200"},
          {"sandwich.n", "1000"},
          {"sandwich.block_len", "10"},
          {"sandwich.n_boot", "500"},
          {"sl.theta", "0.3"},
          {"sl.n", "200"},
          {"sl.ms", "200,400"},
          {"sl.replicates", "5000"},
          {"grid.points", "2001"},
          {"grid.limit", "0.999"},
          {"sv.omega", "-0.736"},
          {"sv.rho", "0.9"},
          {"sv.sigma_v", "0.36"}};
}

json bvm_score_suite(const Config& c, Sink& sink) {
  const auto s0 = c.get_doubles("score.s0");
  const auto s1 = c.get_doubles("score.s1");
  const auto ns = c.get_sizes("score.n");
  if (s0.size() != s1.size() || s0.size() != ns.size()) {
    throw ConfigError("score.s0, score.s1 and score.n must have equal lengths", "score.s0");
  }
  const double lim = c.get_double("score.limit");
  const auto grid = linspace(-lim, lim, c.get_size("score.points"));
  CsvTable t{{"setting", "s0", "s1", "n", "theta", "score", "finite_difference", "rel_error"}, {}};
  json out = json::array();
  for (std::size_t k = 0; k < s0.size(); ++k) {
    Vector s(2);
    s << s0[k], s1[k];
    const std::size_t n = ns[k];
    double worst = 0.0;
    for (double th : grid) {
      const double sc = sl_score_ma1(th, s, n).score;
      const double h = 1e-5 * std::max(1.0, std::abs(th));
      const double fd =
          (ma1_exact_loglik(th + h, s, n) - ma1_exact_loglik(th - h, s, n)) / (2.0 * h) /
          static_cast<double>(n);
      const double rel = std::abs(sc - fd) / std::abs(fd);
      worst = std::max(worst, rel);
      t.rows.push_back({std::to_string(k), tag(s0[k]), tag(s1[k]), std::to_string(n),
                        format_double(th), format_double(sc), format_double(fd),
                        format_double(rel)});
    }
    out.push_back({{"s0", s0[k]}, {"s1", s1[k]}, {"n", n}, {"max_rel_error", worst}});
  }
  sink.csv("score_check.csv", t);
  return out;
}

json bvm_roots_suite(const Config& c, Sink& sink) {
  const std::size_t n = c.get_size("roots.n");
  const auto grid = grid_from(c);
  const double lim = c.get_double("grid.limit");
  const auto brute = linspace(-lim, lim, c.get_size("roots.brute_points"));
  const double spacing = brute[1] - brute[0];
  LongTable table;
  json out = json::array();
  for (double s0 : c.get_doubles("roots.s0")) {
    Vector s(2);
    s << s0, 0.0;
    const RootSet roots =
        find_roots([&](double th) { return sl_score_ma1(th, s, n).score; }, interior(grid));
    std::vector<double> lv(brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) lv[i] = ma1_exact_loglik(brute[i], s, n);
    std::vector<double> bmax;
    for (std::size_t i = 1; i + 1 < lv.size(); ++i) {
      // ">=" on the right keeps one point of a symmetric tied pair.
      if (lv[i] > lv[i - 1] && lv[i] >= lv[i + 1]) bmax.push_back(brute[i]);
    }
    std::vector<double> rmax;
    for (const Root& r : roots.roots) {
      if (r.is_local_max) rmax.push_back(r.theta);
    }
    bool agree = rmax.size() == bmax.size();
    double worst = 0.0;
    for (std::size_t i = 0; agree && i < rmax.size(); ++i) {
      worst = std::max(worst, std::abs(rmax[i] - bmax[i]));
    }
    agree = agree && worst <= spacing;
    const std::string method = "s0=" + tag(s0);
    for (double r : rmax) table.add("roots", method + "/find_roots", n, "local_max", r);
    for (double b : bmax) table.add("roots", method + "/brute", n, "local_max", b);
    out.push_back({{"s0", s0},
                   {"find_roots", rmax},
                   {"brute", bmax},
                   {"max_abs_diff", worst},
                   {"brute_spacing", spacing},
                   {"agree", agree}});
  }
  sink.csv("roots_check.csv", table.table);
  return out;
}

json bvm_rate_suite(const Config& c, Sink& sink) {
  const double theta0 = c.get_double("bvm_rate.theta");
  const Vector s = ma1_exact_mean(theta0).values;
  const double delta = -1.0 / ma1_limit_hessian(theta0, s);
  const auto grid = grid_from(c);
  LongTable table;
  json rows = json::array();
  std::vector<double> d;
  for (std::size_t n : c.get_sizes("bvm_rate.ns")) {
    const GridPosterior post = exact_posterior(s, n, grid, threads_from(c));
    const double l1 = bvm_weighted_l1(post, theta0, delta, n);
    d.push_back(l1);
    table.add("bvm_rate", "exact", n, "weighted_l1", l1);
    rows.push_back({{"n", n}, {"weighted_l1", l1}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < d.size(); ++i) decreasing = decreasing && d[i] < d[i - 1];
  sink.csv("bvm_rate_check.csv", table.table);
  return {{"theta", theta0}, {"delta", delta}, {"rows", rows}, {"decreasing", decreasing}};
}

json bvm_sandwich_suite(const Config& c, Sink& sink) {
  const SvParams sv = sv_from(c);
  const std::size_t n = c.get_size("sandwich.n");
  const std::size_t reps = c.get_size("sandwich.replications");
  const std::uint64_t master = c.get_u64("seed");
  const auto grid = grid_from(c);
  const Matrix delta_n = default_naive_cov(2, n);
  auto mean_fn = [](double t) { return ma1_exact_mean(t).values; };
  BootstrapSpec b;
  b.block_len = c.get_size("sandwich.block_len");
  b.n_boot = c.get_size("sandwich.n_boot");
  const SummaryFn summary = [](std::span<const double> z) { return autocov_values(z, kLags); };

  std::vector<double> means(reps);
  Matrix V = Matrix::Zero(2, 2);
  CsvTable t{{"rep", "posterior_mean"}, {}};
  for (std::size_t r = 0; r < reps; ++r) {
    const std::string path = "bvm/sandwich/rep=" + std::to_string(r);
    const TimeSeries y = simulate_sv(sv, n, derive_seed(master, path + "/data"));
    const GridPosterior post =
        naive_bsl_grid(mean_fn, flat_ma1, autocov01(y), delta_n, grid, threads_from(c));
    means[r] = post.mean();
    b.seed = derive_seed(master, path + "/bootstrap");
    V += static_cast<double>(n) * block_bootstrap_cov(y, summary, b, threads_from(c));
    t.rows.push_back({std::to_string(r), format_double(means[r])});
  }
  V /= static_cast<double>(reps);
  sink.csv("sandwich_means.csv", t);

  // Pseudo-true value of the naive criterion -|b(theta) - b0|^2 / 2 with
  // b0 = (E y^2, 0): theta = 0 unless E y^2 > 3/2.
  const double b01 = sv.second_moment();
  const double theta_star = b01 > 1.5 ? std::sqrt(b01 - 1.5) : 0.0;
  Vector b0(2);
  b0 << b01, 0.0;
  const Matrix G = ma1_mean_gradient(theta_star);
  Vector b2(2);
  b2 << 2.0, 0.0;
  const Vector gap = mean_fn(theta_star) - b0;
  Matrix H(1, 1);
  H(0, 0) = -(G.squaredNorm() + gap.dot(b2));
  const SandwichReport sw =
      sandwich_variance(G, static_cast<double>(n) * delta_n, V, H);
  const double predicted = sw.sandwich(0, 0) / static_cast<double>(n);
  const double empirical = variance_of(means);
  const double ratio = empirical / predicted;
  return {{"n", n},
          {"replications", reps},
          {"theta_star", theta_star},
          {"empirical_var", empirical},
          {"sandwich_var", predicted},
          {"delta_over_n", sw.Delta(0, 0) / static_cast<double>(n)},
          {"ratio", ratio}};
}

json bvm_sl_suite(const Config& c, Sink& sink) {
  const double theta = c.get_double("sl.theta");
  const std::size_t n = c.get_size("sl.n");
  const std::size_t reps = c.get_size("sl.replicates");
  const std::uint64_t master = c.get_u64("seed");
  const Vector s = ma1_exact_mean(theta).values;
  const double exact = std::exp(ma1_exact_loglik(theta, s, n));
  const ModelSpec model = ma1_model();
  const Vector th = Vector::Constant(1, theta);
  LongTable table;
  json rows = json::array();
  double prev = kInf;
  bool decreasing = true;
  for (std::size_t m : c.get_sizes("sl.ms")) {
    std::vector<double> ratio(reps);
    parallel_for(reps, threads_from(c), [&](std::size_t r) {
      const std::uint64_t seed =
          derive_seed(master, "bvm/sl/m=" + std::to_string(m) + "/rep=" + std::to_string(r));
      const SynthLikEstimate est = estimate_sl(model, th, m, n, seed, 1);
      ratio[r] = std::exp(sl_logpdf(est, s)) / exact;
    });
    const double avg = mean_of(ratio);
    const double err = std::abs(avg - 1.0);
    const double se = sd_of(ratio) / std::sqrt(static_cast<double>(reps));
    decreasing = decreasing && err < prev;
    prev = err;
    table.add("sl", "estimated/exact", m, "mean_ratio", avg);
    table.add("sl", "estimated/exact", m, "rel_error", err);
    table.add("sl", "estimated/exact", m, "mc_se", se);
    rows.push_back({{"m", m}, {"mean_ratio", avg}, {"rel_error", err}, {"mc_se", se}});
  }
  sink.csv("sl_check.csv", table.table);
  return {{"theta", theta}, {"n", n}, {"exact_density", exact}, {"rows", rows},
          {"decreasing", decreasing}};
}

json run_bvm(const Config& c, Sink& sink) {
  using Suite = json (*)(const Config&, Sink&);
  const std::vector<std::pair<std::string, Suite>> all = {{"score", bvm_score_suite},
                                                          {"roots", bvm_roots_suite},
                                                          {"bvm_rate", bvm_rate_suite},
                                                          {"sandwich", bvm_sandwich_suite},
                                                          {"sl", bvm_sl_suite}};
  std::vector<std::string> wanted;
  std::stringstream ss(c.get("suites"));
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) continue;
    if (std::none_of(all.begin(), all.end(), [&](const auto& s) { return s.first == item; })) {
      throw ConfigError("unknown suite '" + item + "'", "suites");
    }
    wanted.push_back(item);
  }
  json out = json::object();
  for (const auto& [name, fn] : all) {
    if (std::find(wanted.begin(), wanted.end(), name) != wanted.end()) out[name] = fn(c, sink);
  }
  return out;
}

Defaults with_common(Defaults d) {
  d.emplace("seed", "");
  d.emplace("threads", "1");
  return d;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "simulate",     "exact-posterior", "temper", "rbsl",     "adjust",
      "hessian-scan", "gk",              "abc-contrast", "bvm-check"};
  return names;
}

std::map<std::string, std::string> experiment_defaults(const std::string& name) {
  if (name == "simulate") return with_common(simulate_defaults());
  if (name == "exact-posterior") return with_common(exact_defaults());
  if (name == "temper") return with_common(temper_defaults());
  if (name == "rbsl") return with_common(rbsl_defaults());
  if (name == "adjust") return with_common(adjust_defaults());
  if (name == "hessian-scan") return with_common(hessian_defaults());
  if (name == "gk") return with_common(gk_defaults());
  if (name == "abc-contrast") return with_common(abc_defaults());
  if (name == "bvm-check") return with_common(bvm_defaults());
  throw ConfigError("unknown subcommand '" + name + "'", name);
}

ExperimentResult run_experiment(const std::string& name, Config config,
                                const fs::path& out_dir) {
  config.resolve(experiment_defaults(name));
  config.require("seed");
  config.get_u64("seed");
  fs::create_directories(out_dir);
  ExperimentResult res;
  Sink sink{out_dir, res.artifacts};
  if (name == "simulate") res.summary = run_simulate(config, sink);
  else if (name == "exact-posterior") res.summary = run_exact_posterior(config, sink);
  else if (name == "temper") res.summary = run_temper(config, sink);
  else if (name == "rbsl") res.summary = run_rbsl(config, sink);
  else if (name == "adjust") res.summary = run_adjust(config, sink, res.failures);
  else if (name == "hessian-scan") res.summary = run_hessian_scan(config, sink);
  else if (name == "gk") res.summary = run_gk(config, sink);
  else if (name == "abc-contrast") res.summary = run_abc(config, sink);
  else res.summary = run_bvm(config, sink);

  write_text(out_dir / "summary.json", res.summary.dump(2) + "\n");
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config.hash()));
  json manifest{{"subcommand", name},
                {"seed", config.get_u64("seed")},
                {"config", config.entries()},
                {"config_hash", hash},
                {"version", kVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"compiler", __VERSION__},
                {"artifacts", res.artifacts},
                {"failures", res.failures}};
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return res;
}

}  // namespace bslmis
