#include "bslmis/common.hpp"
#include "bslmis/config.hpp"
#include "bslmis/experiments.hpp"
#include "bslmis/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using bslmis::Config;

namespace {

// Exit codes: 1 = runtime failure, 2 = bad config or input, 3 = partial batch failure.
int report_error(const fs::path& out, const std::string& cmd, const std::string& kind,
                 const std::string& what, const nlohmann::json& extra) {
  nlohmann::json rec{{"status", "error"}, {"subcommand", cmd}, {"kind", kind}, {"message", what}};
  if (extra.is_object()) rec.update(extra);
  std::cerr << rec.dump() << "\n";
  try {
    bslmis::write_text(out / "error.json", rec.dump(2) + "\n");
  } catch (...) {
    // The record on stderr is enough when the directory is unwritable.
  }
  return (kind == "config" || kind == "parse") ? 2 : 1;
}

fs::path default_out(const std::string& cmd) {
  if (const char* env = std::getenv("BSLMIS_OUT_DIR"); env != nullptr && *env != '\0') {
    return fs::path(env) / cmd;
  }
  return fs::path("out") / cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian synthetic likelihood under misspecification: experiment runner"};
  app.require_subcommand(1);

  struct Opts {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool log_returns = false;
  };
  std::map<std::string, Opts> opts;
  for (const std::string& name : bslmis::experiment_names()) {
    Opts& o = opts[name];
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", o.config, "key = value config file");
    sub->add_option("--set", o.sets, "override, key=value (repeatable; wins over --config)");
    sub->add_option("--out", o.out, "output directory (default $BSLMIS_OUT_DIR/<cmd> or out/<cmd>)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--threads", o.threads, "worker threads");
    if (name == "gk") sub->add_flag("--log-returns", o.log_returns, "difference logs of the data column");
  }
  app.add_flag_callback("--list-keys", [] {
    for (const std::string& name : bslmis::experiment_names()) {
      std::cout << "[" << name << "]\n";
      for (const auto& [k, v] : bslmis::experiment_defaults(name)) {
        std::cout << k << " = " << v << "\n";
      }
    }
    std::exit(0);
  }, "print every subcommand's keys with defaults");

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  const Opts& o = opts.at(cmd);
  const fs::path out = o.out.empty() ? default_out(cmd) : fs::path(o.out);

  try {
    Config config = o.config.empty() ? Config{} : Config::load(o.config);
    for (const std::string& s : o.sets) config.apply_override(s);
    if (o.seed) config.set("seed", std::to_string(*o.seed));
    if (o.threads) config.set("threads", std::to_string(*o.threads));
    if (o.log_returns) config.set("data.log_returns", "true");
    fs::remove(out / "error.json");

    const bslmis::ExperimentResult res = bslmis::run_experiment(cmd, config, out);
    if (res.failures > 0) {
      report_error(out, cmd, "partial-failure",
                   std::to_string(res.failures) + " replication(s) failed; see the error column",
                   {{"failures", res.failures}});
      return 3;
    }
    std::cout << nlohmann::json{{"status", "ok"},
                                {"subcommand", cmd},
                                {"out", out.string()},
                                {"artifacts", res.artifacts}}
                     .dump()
              << "\n";
    return 0;
  } catch (const bslmis::ConfigError& e) {
    return report_error(out, cmd, e.kind(), e.what(), {{"key", e.key()}});
  } catch (const bslmis::ParseError& e) {
    return report_error(out, cmd, e.kind(), e.what(), {{"line", e.line()}});
  } catch (const bslmis::Error& e) {
    return report_error(out, cmd, e.kind(), e.what(), {});
  } catch (const std::exception& e) {
    return report_error(out, cmd, "internal", e.what(), {});
  }
}
