// hierband command-line interface.
//
// Subcommands:
//   run               run every configured policy and write batch CSVs
//   generate-dataset  emit a loadable synthetic dataset directory
//   analyze           aggregate a ratings CSV per category
//   validate          check a configuration and its referenced files
//
// `run` and `validate` take exactly one of --config PATH or --preset NAME.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hierband/commands.hpp"
#include "hierband/config.hpp"
#include "hierband/csv.hpp"

namespace {

hierband::RunConfig resolve_config(const std::string& config_path,
                                   const std::string& preset_name) {
  if (!config_path.empty() && !preset_name.empty()) {
    throw std::invalid_argument("pass either --config or --preset, not both");
  }
  if (!config_path.empty()) {
    return hierband::load_config(config_path);
  }
  if (!preset_name.empty()) {
    return hierband::preset_config(preset_name);
  }
  throw std::invalid_argument("one of --config or --preset is required");
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> alphas;
  std::string current;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      if (current.empty()) {
        throw std::invalid_argument("--alphas: empty entry in '" + text + "'");
      }
      alphas.push_back(hierband::csv::parse_double(current, "--alphas"));
      current.clear();
    } else {
      current.push_back(text[i]);
    }
  }
  return alphas;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical conversational bandit experiment toolkit"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  std::string run_config_path;
  std::string run_preset;
  std::string run_out_override;
  std::int64_t run_seed_override = -1;
  CLI::App* run = app.add_subcommand(
      "run", "run all configured policies and write batch CSVs");
  run->add_option("--config", run_config_path, "configuration file path");
  run->add_option("--preset", run_preset, "built-in configuration name");
  run->add_option("--out", run_out_override, "override the output directory");
  run->add_option("--seed", run_seed_override,
                  "override the base seed (non-negative)");

  // --- generate-dataset --------------------------------------------------
  hierband::DatasetSpec gen_spec;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "dataset";
  CLI::App* gen = app.add_subcommand(
      "generate-dataset", "emit items.csv, graph.csv, users.csv + metadata");
  gen->add_option("--users", gen_spec.num_users, "number of users")
      ->required();
  gen->add_option("--items", gen_spec.num_items, "total number of items")
      ->required();
  gen->add_option("--keyterms", gen_spec.num_keyterms, "number of key terms")
      ->required();
  gen->add_option("--dim", gen_spec.dim, "feature dimension")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");

  // --- analyze -----------------------------------------------------------
  std::string analyze_ratings;
  std::string analyze_alphas = "0.2,0.5,1.0";
  std::string analyze_out = "aggregates.csv";
  CLI::App* analyze = app.add_subcommand(
      "analyze", "per-category aggregate report from a ratings CSV");
  analyze->add_option("ratings", analyze_ratings, "ratings CSV path")
      ->required();
  analyze->add_option("--alphas", analyze_alphas,
                      "comma-separated top-share fractions in (0,1]");
  analyze->add_option("--out", analyze_out, "report CSV path");

  // --- validate ----------------------------------------------------------
  std::string validate_config_path;
  std::string validate_preset;
  CLI::App* validate = app.add_subcommand(
      "validate", "check a configuration and its referenced files");
  validate->add_option("--config", validate_config_path,
                       "configuration file path");
  validate->add_option("--preset", validate_preset,
                       "built-in configuration name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      hierband::RunConfig config = resolve_config(run_config_path, run_preset);
      if (!run_out_override.empty()) {
        config.output_dir = run_out_override;
      }
      if (run_seed_override >= 0) {
        config.base_seed = static_cast<std::uint64_t>(run_seed_override);
      }
      const std::string manifest = hierband::cmd_run(config);
      std::cout << "wrote " << manifest << "\n";
    } else if (gen->parsed()) {
      hierband::cmd_generate_dataset(gen_spec, gen_seed, gen_out);
      std::cout << "wrote dataset to " << gen_out << "\n";
    } else if (analyze->parsed()) {
      hierband::cmd_analyze(analyze_ratings, parse_alpha_list(analyze_alphas),
                            analyze_out);
      std::cout << "wrote " << analyze_out << "\n";
    } else if (validate->parsed()) {
      hierband::RunConfig config =
          resolve_config(validate_config_path, validate_preset);
      std::cout << hierband::cmd_validate(config) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
