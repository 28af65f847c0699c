#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hierband/config.hpp"

namespace hierband {

/// Runs one repetition batch per configured policy and writes
/// `<out>/<experiment>_<kind>.csv` for each, plus
/// `<out>/<experiment>_manifest.json` recording the config hash, seeds,
/// and per-policy final mean regret. Returns the manifest path.
/// Reruns overwrite in place and are byte-identical for the same config.
std::string cmd_run(const RunConfig& config);

struct DatasetSpec {
  int num_users = 0;
  int num_items = 0;
  int num_keyterms = 0;
  int dim = 0;
};

/// Generates a loadable dataset into out_dir: items.csv and users.csv
/// with unit-sphere feature rows, graph.csv with a shuffled balanced
/// one-key-term-per-item assignment, and dataset.json describing the
/// generation. Key-term features are derived per user at load time, so
/// no key-term file is emitted. Same seed, same bytes.
void cmd_generate_dataset(const DatasetSpec& spec, std::uint64_t seed,
                          const std::string& out_dir);

/// Reads `category,item,rating[,weight]`, aggregates per category, and
/// writes `category,simple,top_<alpha>...[,weighted]` to out_path.
void cmd_analyze(const std::string& ratings_path,
                 const std::vector<double>& alphas,
                 const std::string& out_path);

/// Builds the configured environment once (loading any dataset files)
/// and returns a one-paragraph summary; malformed inputs throw with the
/// offending file or field named.
std::string cmd_validate(const RunConfig& config);

}  // namespace hierband
