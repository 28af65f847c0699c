#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hierband {

/// One policy entry in a run configuration. Only the parameters that the
/// kind actually consumes may appear in the document.
struct PolicySpec {
  std::string kind;     // hier_ucb | ucb | hier_linucb | linucb | freqcon_linucb
  double gamma = 1.0;   // hier_ucb, hier_linucb
  double alpha = 0.25;  // hier_linucb, linucb, freqcon_linucb
};

struct EnvSpec {
  std::string kind;  // synthetic-stochastic | synthetic-contextual | dataset
  // synthetic kinds
  int num_keyterms = 0;
  int items_per_keyterm = 0;
  double lambda = 0.5;
  double sigma = 0.0;                  // contextual / dataset
  std::string dim_mode = "random-unit";  // contextual: one-hot | random-unit
  int dim = 0;                         // contextual random-unit; 0 = item count
  // dataset kind
  std::string items;
  std::string keyterms;  // optional; empty = derive per user
  std::string graph;
  std::string users;
};

struct RunConfig {
  std::string experiment;
  EnvSpec environment;
  std::vector<PolicySpec> policies;
  long horizon = 0;
  int repetitions = 0;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
};

/// Strict parse: unknown keys anywhere are an error, as are parameters a
/// policy kind does not take. Semantic violations name the field (e.g.
/// "lambda out of range"); dataset file paths must exist.
RunConfig parse_config(const std::string& text);

/// parse_config over a file's contents; errors name the path.
RunConfig load_config(const std::string& path);

/// Built-in configurations: "paper-synthetic" (the 10x10 Bernoulli
/// benchmark) and "desk-contextual" (a small random-feature setup).
RunConfig preset_config(const std::string& name);

/// Canonical serialization of the result-determining fields (environment,
/// policies, horizon, repetitions, base seed) used for hashing; the
/// experiment name and output directory do not affect it.
std::string canonical_config(const RunConfig& config);

/// FNV-1a 64-bit hash of canonical_config, as a fixed-width hex string.
std::string config_hash(const RunConfig& config);

}  // namespace hierband
