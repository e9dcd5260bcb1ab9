#pragma once

#include "bslmis/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bslmis {

// Subcommand names in the order the CLI lists them.
const std::vector<std::string>& experiment_names();

// Every key a subcommand accepts, with its default. "seed" has no default
// and must be supplied.
std::map<std::string, std::string> experiment_defaults(const std::string& name);

struct ExperimentResult {
  // Key metrics, also written to summary.json.
  nlohmann::json summary;
  // Output files relative to the output directory, in write order.
  std::vector<std::string> artifacts;
  // Replications that failed inside a batch; the CLI exits nonzero when > 0.
  std::size_t failures = 0;
};

// Resolves config against the subcommand defaults (unknown key -> ConfigError),
// runs it, and writes CSV artifacts, summary.json and manifest.json to out_dir.
// The manifest holds the resolved config, so a run is reproducible from it.
ExperimentResult run_experiment(const std::string& name, Config config,
                                const std::filesystem::path& out_dir);

}  // namespace bslmis
