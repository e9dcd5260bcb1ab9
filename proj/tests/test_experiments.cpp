#include "bslmis/config.hpp"
#include "bslmis/experiments.hpp"
#include "bslmis/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bslmis;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bslmis_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config small(std::initializer_list<std::pair<const char*, const char*>> kv) {
  Config c;
  c.set("seed", "99");
  for (const auto& [k, v] : kv) c.set(k, v);
  return c;
}

// Runs twice into separate directories and checks every CSV matches byte for byte.
ExperimentResult run_twice(const std::string& name, const Config& c) {
  const fs::path a = scratch(name + "_a");
  const fs::path b = scratch(name + "_b");
  const auto ra = run_experiment(name, c, a);
  const auto rb = run_experiment(name, c, b);
  REQUIRE(ra.artifacts == rb.artifacts);
  for (const auto& f : ra.artifacts) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(fs::exists(a / "summary.json"));
  fs::remove_all(a);
  fs::remove_all(b);
  return ra;
}

}  // namespace

TEST_CASE("every subcommand has defaults and a seed key") {
  for (const auto& name : experiment_names()) {
    const auto d = experiment_defaults(name);
    CHECK(d.count("seed") == 1);
    CHECK(d.count("threads") == 1);
  }
  CHECK_THROWS_AS(experiment_defaults("nope"), ConfigError);
}

TEST_CASE("config errors") {
  const fs::path out = scratch("errors");
  try {
    run_experiment("temper", small({{"no_such_key", "1"}}), out);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "no_such_key");
  }
  try {
    run_experiment("temper", Config{}, out);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "seed");
  }
  CHECK_THROWS_AS(run_experiment("rbsl", small({{"gamma_form", "bogus"}}), out), ConfigError);
  CHECK_THROWS_AS(run_experiment("bvm-check", small({{"suites", "score,bogus"}}), out), ConfigError);
  fs::remove_all(out);
}

TEST_CASE("simulate") {
  const auto r = run_twice("simulate", small({{"model", "ma1"}, {"n", "200"}}));
  CHECK(r.artifacts == std::vector<std::string>{"series.csv", "summaries.csv"});
  run_twice("simulate", small({{"model", "gk"}, {"n", "200"}}));
  CHECK_THROWS_AS(run_experiment("simulate", small({{"model", "ar2"}}), scratch("sim_bad")),
                  ConfigError);
}

TEST_CASE("exact-posterior writes one curve file per S0") {
  const fs::path out = scratch("exact");
  const auto r = run_experiment("exact-posterior", small({{"ns", "1000"}}), out);
  std::size_t curves = 0;
  for (const auto& f : r.artifacts) curves += f.rfind("posterior_s0=", 0) == 0;
  CHECK(curves == 6);
  const auto t = read_csv(out / "posterior_s0=0.99.csv");
  CHECK(t.header == std::vector<std::string>{"n", "theta", "density", "log_unnorm"});
  CHECK(t.rows.size() == 2001);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["seed"] == 99);
  CHECK(manifest["config"]["ns"] == "1000");
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  // the manifest config alone reproduces the run
  Config again;
  for (const auto& [k, v] : manifest["config"].items()) again.set(k, v.get<std::string>());
  const fs::path out2 = scratch("exact2");
  run_experiment("exact-posterior", again, out2);
  for (const auto& f : r.artifacts) CHECK(slurp(out / f) == slurp(out2 / f));
  fs::remove_all(out);
  fs::remove_all(out2);

  const auto sv = run_twice("exact-posterior",
                            small({{"source", "sv"}, {"replications", "3"}, {"write_curves", "1"}}));
  CHECK(sv.summary.contains("fraction_bimodal_low_central"));
}

TEST_CASE("temper") {
  const auto r = run_twice("temper", small({{"replications", "3"}, {"write_curves", "1"}}));
  CHECK(r.summary["all_identical"] == true);
}

TEST_CASE("rbsl") {
  const auto r = run_twice("rbsl", small({{"ns", "100"}, {"iterations", "300"}}));
  CHECK(r.summary["runs"].size() == 1);
}

TEST_CASE("adjust") {
  const auto r = run_twice("adjust", small({{"ns", "100"},
                                            {"replications", "3"},
                                            {"n_draws", "500"},
                                            {"bootstrap.n_boot", "100"}}));
  CHECK(r.failures == 0);
  CHECK(r.summary["cells"].size() == 2);
}

TEST_CASE("hessian-scan") {
  const auto r = run_twice("hessian-scan", small({{"s0", "0.25"}, {"grid.points", "401"}}));
  CHECK(r.summary["scans"][0]["modes"].size() == 2);
}

TEST_CASE("abc-contrast") {
  const auto r = run_twice("abc-contrast", small({{"sims", "2000"}, {"keep_frac", "0.05"}}));
  CHECK(r.summary["accepted"] == 100);
}

TEST_CASE("bvm-check") {
  const auto r = run_twice("bvm-check", small({{"suites", "score,roots,sl"},
                                               {"roots.brute_points", "20001"},
                                               {"sl.replicates", "50"}}));
  CHECK(r.summary.contains("score"));
  CHECK_FALSE(r.summary.contains("sandwich"));
  for (const auto& s : r.summary["score"]) CHECK(s["max_rel_error"].get<double>() < 1e-5);
}

TEST_CASE("gk on a csv file") {
  const fs::path dir = scratch("gk_csv");
  std::string text = "r\n";
  for (int i = 0; i < 150; ++i) text += std::to_string(0.01 * ((i * 37) % 101) - 0.5) + "\n";
  write_text(dir / "data.csv", text);
  Config c = small({{"data.source", "csv"},
                    {"iterations", "40"},
                    {"burn_in", "10"},
                    {"m", "20"},
                    {"m_standard", "20"},
                    {"fit.m", "20"},
                    {"cov.m", "50"},
                    {"grad.m", "50"},
                    {"ppc.replicates", "20"},
                    {"bootvar.replicates", "5"},
                    {"bootvar.n_boot", "20"},
                    {"bootstrap.n_boot", "50"}});
  c.set("data.path", (dir / "data.csv").string());
  const auto r = run_twice("gk", c);
  CHECK(r.summary["n"] == 150);
  CHECK(r.summary["rbsl"]["gamma_departure"].size() == 4);
  write_text(dir / "short.csv", "r\n1\n2\n3\n");
  c.set("data.path", (dir / "short.csv").string());
  CHECK_THROWS_AS(run_experiment("gk", c, dir / "out"), DomainError);
  fs::remove_all(dir);
}
