#pragma once

#include <string>

#include "gcql/config.hpp"
#include "gcql/learner.hpp"

namespace gcql {

// Builds a TrainConfig from flat config keys (steps, gamma, lr, batch,
// chain, neg_mode, loss, ...), leaving defaults in place for absent keys.
TrainConfig train_config_from(const KeyValueConfig& cfg, uint64_t seed);

// Parses "c:f,c:f,..." into mixture components.
std::vector<MixComponent> parse_mix(const std::string& text);

DataMode parse_data_mode(const std::string& text);

// Runs the experiment named in the config across its seeds and writes the
// artifact directory (config snapshot, seed list, version string, metrics
// CSVs, eval reports, summary.json, SVG plots). Returns the number of failed
// runs; 0 means every run completed.
int run_experiment(const KeyValueConfig& cfg);

std::string version_string();

}  // namespace gcql
