#include "hierband/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hierband/aggregates.hpp"
#include "hierband/csv.hpp"
#include "hierband/env.hpp"
#include "hierband/harness.hpp"
#include "hierband/policies.hpp"
#include "hierband/rng.hpp"

namespace hierband {
namespace {

using nlohmann::ordered_json;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

DimMode parse_dim_mode(const std::string& mode) {
  return mode == "one-hot" ? DimMode::kOneHot : DimMode::kRandomUnit;
}

/// Environment factory honouring the config's kind. Dataset environments
/// are loaded once up front; repetition i plays user i modulo the user
/// count (reseeded per repetition by the harness).
EnvBuilder make_env_builder(const RunConfig& config) {
  const EnvSpec& spec = config.environment;
  if (spec.kind == "synthetic-stochastic") {
    return [spec](std::uint64_t seed) {
      return std::make_unique<StochasticEnv>(build_synthetic_stochastic(
          spec.num_keyterms, spec.items_per_keyterm, Discount(spec.lambda),
          seed));
    };
  }
  if (spec.kind == "synthetic-contextual") {
    return [spec](std::uint64_t seed) {
      return std::make_unique<ContextualEnv>(build_synthetic_contextual(
          spec.num_keyterms, spec.items_per_keyterm,
          parse_dim_mode(spec.dim_mode), Discount(spec.lambda), spec.sigma,
          seed, spec.dim));
    };
  }
  require(spec.kind == "dataset",
          "unknown environment kind '" + spec.kind + "'");
  DatasetPaths paths;
  paths.items = spec.items;
  if (!spec.keyterms.empty()) paths.keyterms = spec.keyterms;
  paths.graph = spec.graph;
  paths.users = spec.users;
  auto users = std::make_shared<std::vector<ContextualEnv>>(
      load_dataset_env(paths, Discount(spec.lambda), spec.sigma));
  std::uint64_t base = config.base_seed;
  return [users, base](std::uint64_t seed) {
    std::size_t index =
        static_cast<std::size_t>((seed - base) % users->size());
    return (*users)[index].clone();
  };
}

PolicyBuilder make_policy_builder(const PolicySpec& spec,
                                  const Catalog& catalog, int dim) {
  bool linear = spec.kind == "hier_linucb" || spec.kind == "linucb" ||
                spec.kind == "freqcon_linucb";
  require(!linear || dim >= 1,
          "policy '" + spec.kind +
              "' needs feature contexts but the environment provides none");
  if (spec.kind == "hier_ucb")
    return [catalog, spec](std::uint64_t) {
      return std::make_unique<HierUcbPolicy>(catalog, spec.gamma);
    };
  if (spec.kind == "ucb")
    return [catalog](std::uint64_t) {
      return std::make_unique<UcbPolicy>(catalog);
    };
  if (spec.kind == "hier_linucb")
    return [catalog, spec, dim](std::uint64_t) {
      return std::make_unique<HierLinUcbPolicy>(catalog, dim, spec.gamma,
                                                spec.alpha);
    };
  if (spec.kind == "linucb")
    return [catalog, spec, dim](std::uint64_t) {
      return std::make_unique<LinUcbPolicy>(catalog, dim, spec.alpha);
    };
  require(spec.kind == "freqcon_linucb",
          "unknown policy kind '" + spec.kind + "'");
  return [catalog, spec, dim](std::uint64_t) {
    return std::make_unique<FreqConLinUcbPolicy>(catalog, dim, spec.alpha);
  };
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  return out;
}

}  // namespace

std::string cmd_run(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  EnvBuilder env_builder = make_env_builder(config);

  auto probe = env_builder(config.base_seed);
  Catalog catalog = probe->catalog();
  ContextSet contexts = probe->contexts();
  int dim =
      contexts.items == nullptr ? 0 : static_cast<int>(contexts.items->rows());

  ordered_json manifest;
  manifest["experiment"] = config.experiment;
  manifest["config_hash"] = config_hash(config);
  manifest["horizon"] = config.horizon;
  manifest["repetitions"] = config.repetitions;
  manifest["base_seed"] = config.base_seed;
  ordered_json seeds = ordered_json::array();
  for (int rep = 0; rep < config.repetitions; ++rep)
    seeds.push_back(config.base_seed + static_cast<std::uint64_t>(rep));
  manifest["seeds"] = seeds;

  ordered_json policy_entries = ordered_json::array();
  for (const PolicySpec& spec : config.policies) {
    PolicyBuilder policy_builder = make_policy_builder(spec, catalog, dim);
    BatchResult batch = run_batch(env_builder, policy_builder, config.horizon,
                                  config.repetitions, config.base_seed);
    std::string csv_name = config.experiment + "_" + spec.kind + ".csv";
    std::string csv_path =
        (std::filesystem::path(config.output_dir) / csv_name).string();
    write_batch_csv(csv_path, batch);

    ordered_json entry;
    entry["kind"] = spec.kind;
    entry["csv"] = csv_name;
    entry["final_mean_cum_regret"] = batch.mean_cum_regret.back();
    policy_entries.push_back(entry);
  }
  manifest["policies"] = policy_entries;

  std::string manifest_path =
      (std::filesystem::path(config.output_dir) /
       (config.experiment + "_manifest.json"))
          .string();
  auto out = open_out(manifest_path);
  out << manifest.dump(2) << '\n';
  return manifest_path;
}

void cmd_generate_dataset(const DatasetSpec& spec, std::uint64_t seed,
                          const std::string& out_dir) {
  require(spec.num_users >= 1, "num_users must be positive");
  require(spec.num_items >= 1, "num_items must be positive");
  require(spec.num_keyterms >= 1, "num_keyterms must be positive");
  require(spec.dim >= 1, "dim must be positive");
  require(spec.num_items >= spec.num_keyterms,
          "num_items must be at least num_keyterms so no key-term is empty");

  std::filesystem::create_directories(out_dir);
  Rng rng(seed);

  Eigen::MatrixXd items(spec.dim, spec.num_items);
  for (int a = 0; a < spec.num_items; ++a)
    items.col(a) = rng.unit_sphere(spec.dim);

  Eigen::MatrixXd users(spec.dim, spec.num_users);
  for (int u = 0; u < spec.num_users; ++u)
    users.col(u) = rng.unit_sphere(spec.dim);

  // Balanced random assignment: shuffle the items, deal them round-robin
  // across key-terms. Every key-term receives at least one item.
  std::vector<int> order(static_cast<std::size_t>(spec.num_items));
  for (int a = 0; a < spec.num_items; ++a)
    order[static_cast<std::size_t>(a)] = a;
  for (int i = spec.num_items - 1; i >= 1; --i) {
    auto j = static_cast<int>(rng.uniform01() * (i + 1));
    if (j > i) j = i;
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }
  std::vector<CatalogEdge> edges;
  for (int position = 0; position < spec.num_items; ++position)
    edges.push_back(CatalogEdge{order[static_cast<std::size_t>(position)],
                                position % spec.num_keyterms, 1.0});
  std::sort(edges.begin(), edges.end(),
            [](const CatalogEdge& a, const CatalogEdge& b) {
              return a.item < b.item;
            });

  namespace fs = std::filesystem;
  csv::write_context_csv((fs::path(out_dir) / "items.csv").string(), "item_id",
                         items);
  csv::write_context_csv((fs::path(out_dir) / "users.csv").string(), "user_id",
                         users);
  csv::write_graph_csv((fs::path(out_dir) / "graph.csv").string(), edges,
                       /*with_weights=*/false);

  ordered_json meta;
  meta["num_users"] = spec.num_users;
  meta["num_items"] = spec.num_items;
  meta["num_keyterms"] = spec.num_keyterms;
  meta["dim"] = spec.dim;
  meta["seed"] = seed;
  ordered_json files;
  files["items"] = "items.csv";
  files["graph"] = "graph.csv";
  files["users"] = "users.csv";
  meta["files"] = files;
  auto out = open_out((fs::path(out_dir) / "dataset.json").string());
  out << meta.dump(2) << '\n';
}

void cmd_analyze(const std::string& ratings_path,
                 const std::vector<double>& alphas,
                 const std::string& out_path) {
  require(!alphas.empty(), "at least one alpha is required");
  for (double alpha : alphas)
    require(alpha > 0.0 && alpha <= 1.0,
            "alpha " + std::to_string(alpha) + " outside (0, 1]");

  RatingTable table = RatingTable::from_rows(csv::read_ratings_csv(ratings_path));
  auto report = compare_aggregates(table, alphas);

  bool weighted = true;
  for (const AggregateRow& row : report)
    if (!row.weighted.has_value()) weighted = false;

  auto out = open_out(out_path);
  out << "category,simple";
  for (double alpha : alphas) out << ",top_" << csv::format_double_compact(alpha);
  if (weighted) out << ",weighted";
  out << '\n';
  for (const AggregateRow& row : report) {
    out << row.category << ',' << csv::format_double_exact(row.simple);
    for (double value : row.top_alpha)
      out << ',' << csv::format_double_exact(value);
    if (weighted) out << ',' << csv::format_double_exact(*row.weighted);
    out << '\n';
  }
}

std::string cmd_validate(const RunConfig& config) {
  EnvBuilder env_builder = make_env_builder(config);
  auto probe = env_builder(config.base_seed);
  ContextSet contexts = probe->contexts();
  int dim =
      contexts.items == nullptr ? 0 : static_cast<int>(contexts.items->rows());
  for (const PolicySpec& spec : config.policies)
    (void)make_policy_builder(spec, probe->catalog(), dim);

  std::ostringstream summary;
  summary << "config ok: experiment '" << config.experiment << "', hash "
          << config_hash(config) << "; environment '"
          << config.environment.kind << "' with "
          << probe->catalog().num_items() << " items, "
          << probe->catalog().num_keyterms() << " key-terms";
  if (dim > 0) summary << ", feature dim " << dim;
  summary << "; " << config.policies.size() << " policies, horizon "
          << config.horizon << ", " << config.repetitions << " repetitions";
  return summary.str();
}

}  // namespace hierband
