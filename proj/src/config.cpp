#include "hierband/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hierband {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

const json& member(const json& obj, const std::string& key,
                   const std::string& where) {
  auto it = obj.find(key);
  require(it != obj.end(), where + ": missing required key '" + key + "'");
  return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    require(allowed.count(it.key()) != 0,
            where + ": unknown key '" + it.key() + "'");
}

double as_number(const json& v, const std::string& field) {
  require(v.is_number(), "field '" + field + "' must be a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& field) {
  require(v.is_number_integer(), "field '" + field + "' must be an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& field) {
  require(v.is_string(), "field '" + field + "' must be a string");
  return v.get<std::string>();
}

EnvSpec parse_environment(const json& obj) {
  require(obj.is_object(), "'environment' must be an object");
  EnvSpec env;
  env.kind = as_string(member(obj, "kind", "environment"), "environment.kind");

  if (env.kind == "synthetic-stochastic" || env.kind == "synthetic-contextual") {
    std::set<std::string> allowed{"kind", "num_keyterms", "items_per_keyterm",
                                  "lambda"};
    if (env.kind == "synthetic-contextual") {
      allowed.insert("sigma");
      allowed.insert("dim_mode");
      allowed.insert("dim");
    }
    reject_unknown(obj, allowed, "environment");
    env.num_keyterms = static_cast<int>(as_integer(
        member(obj, "num_keyterms", "environment"), "num_keyterms"));
    env.items_per_keyterm = static_cast<int>(as_integer(
        member(obj, "items_per_keyterm", "environment"), "items_per_keyterm"));
    require(env.num_keyterms >= 1, "num_keyterms must be positive");
    require(env.items_per_keyterm >= 1, "items_per_keyterm must be positive");
    env.lambda = as_number(member(obj, "lambda", "environment"), "lambda");
    if (env.kind == "synthetic-contextual") {
      if (obj.contains("sigma"))
        env.sigma = as_number(obj.at("sigma"), "sigma");
      if (obj.contains("dim_mode"))
        env.dim_mode = as_string(obj.at("dim_mode"), "dim_mode");
      require(env.dim_mode == "one-hot" || env.dim_mode == "random-unit",
              "unknown dim_mode '" + env.dim_mode + "'");
      if (obj.contains("dim"))
        env.dim = static_cast<int>(as_integer(obj.at("dim"), "dim"));
      require(env.dim >= 0, "dim must be nonnegative");
    }
  } else if (env.kind == "dataset") {
    reject_unknown(obj,
                   {"kind", "items", "keyterms", "graph", "users", "lambda",
                    "sigma"},
                   "environment");
    env.items = as_string(member(obj, "items", "environment"), "items");
    env.graph = as_string(member(obj, "graph", "environment"), "graph");
    env.users = as_string(member(obj, "users", "environment"), "users");
    if (obj.contains("keyterms"))
      env.keyterms = as_string(obj.at("keyterms"), "keyterms");
    env.lambda = as_number(member(obj, "lambda", "environment"), "lambda");
    if (obj.contains("sigma")) env.sigma = as_number(obj.at("sigma"), "sigma");
    for (const std::string& path : {env.items, env.graph, env.users})
      require(std::filesystem::exists(path),
              "referenced file does not exist: " + path);
    if (!env.keyterms.empty())
      require(std::filesystem::exists(env.keyterms),
              "referenced file does not exist: " + env.keyterms);
  } else {
    throw std::invalid_argument("unknown environment kind '" + env.kind + "'");
  }

  require(std::isfinite(env.lambda) && env.lambda > 0.0 && env.lambda <= 1.0,
          "lambda out of range (need 0 < lambda <= 1, got " +
              std::to_string(env.lambda) + ")");
  require(std::isfinite(env.sigma) && env.sigma >= 0.0,
          "sigma must be finite and nonnegative");
  return env;
}

PolicySpec parse_policy(const json& obj, std::size_t index) {
  std::string where = "policies[" + std::to_string(index) + "]";
  require(obj.is_object(), where + " must be an object");
  PolicySpec spec;
  spec.kind = as_string(member(obj, "kind", where), where + ".kind");

  std::set<std::string> allowed{"kind"};
  bool takes_gamma = spec.kind == "hier_ucb" || spec.kind == "hier_linucb";
  bool takes_alpha = spec.kind == "hier_linucb" || spec.kind == "linucb" ||
                     spec.kind == "freqcon_linucb";
  if (spec.kind != "hier_ucb" && spec.kind != "ucb" &&
      spec.kind != "hier_linucb" && spec.kind != "linucb" &&
      spec.kind != "freqcon_linucb")
    throw std::invalid_argument("unknown policy kind '" + spec.kind + "'");
  if (takes_gamma) allowed.insert("gamma");
  if (takes_alpha) allowed.insert("alpha");
  reject_unknown(obj, allowed, where);

  if (obj.contains("gamma"))
    spec.gamma = as_number(obj.at("gamma"), where + ".gamma");
  if (obj.contains("alpha"))
    spec.alpha = as_number(obj.at("alpha"), where + ".alpha");
  require(std::isfinite(spec.gamma) && spec.gamma >= 0.0,
          where + ": gamma must be finite and nonnegative");
  require(std::isfinite(spec.alpha) && spec.alpha >= 0.0,
          where + ": alpha must be finite and nonnegative");
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  require(doc.is_object(), "config root must be an object");
  reject_unknown(doc,
                 {"experiment", "environment", "policies", "horizon",
                  "repetitions", "base_seed", "output_dir"},
                 "config");

  RunConfig config;
  config.experiment =
      as_string(member(doc, "experiment", "config"), "experiment");
  require(!config.experiment.empty(), "experiment name must not be empty");
  config.environment = parse_environment(member(doc, "environment", "config"));

  const json& policies = member(doc, "policies", "config");
  require(policies.is_array() && !policies.empty(),
          "'policies' must be a non-empty array");
  std::set<std::string> seen_kinds;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    PolicySpec spec = parse_policy(policies[i], i);
    require(seen_kinds.insert(spec.kind).second,
            "duplicate policy kind '" + spec.kind + "'");
    config.policies.push_back(spec);
  }

  config.horizon = as_integer(member(doc, "horizon", "config"), "horizon");
  require(config.horizon >= 1, "horizon must be at least 1");
  config.repetitions = static_cast<int>(
      as_integer(member(doc, "repetitions", "config"), "repetitions"));
  require(config.repetitions >= 1, "repetitions must be at least 1");
  const json& seed = member(doc, "base_seed", "config");
  require(seed.is_number_integer() &&
              (seed.is_number_unsigned() || seed.get<long long>() >= 0),
          "base_seed must be a nonnegative integer");
  config.base_seed = seed.get<std::uint64_t>();
  if (doc.contains("output_dir"))
    config.output_dir = as_string(doc.at("output_dir"), "output_dir");
  require(!config.output_dir.empty(), "output_dir must not be empty");

  bool needs_contexts = false;
  for (const PolicySpec& spec : config.policies)
    if (spec.kind == "hier_linucb" || spec.kind == "linucb" ||
        spec.kind == "freqcon_linucb")
      needs_contexts = true;
  (void)needs_contexts;  // every built-in environment provides contexts
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

RunConfig preset_config(const std::string& name) {
  if (name == "paper-synthetic") {
    RunConfig config;
    config.experiment = "paper-synthetic";
    config.environment.kind = "synthetic-stochastic";
    config.environment.num_keyterms = 10;
    config.environment.items_per_keyterm = 10;
    config.environment.lambda = 0.5;
    config.policies = {{"hier_ucb", 1.0, 0.25},
                       {"ucb", 1.0, 0.25},
                       {"hier_linucb", 1.0, 0.25}};
    config.horizon = 50000;
    config.repetitions = 50;
    config.base_seed = 1;
    return config;
  }
  if (name == "desk-contextual") {
    RunConfig config;
    config.experiment = "desk-contextual";
    config.environment.kind = "synthetic-contextual";
    config.environment.num_keyterms = 20;
    config.environment.items_per_keyterm = 10;
    config.environment.lambda = 0.5;
    config.environment.sigma = 0.1;
    config.environment.dim_mode = "random-unit";
    config.environment.dim = 20;
    config.policies = {{"hier_linucb", 0.5, 0.25},
                       {"linucb", 1.0, 0.25},
                       {"freqcon_linucb", 1.0, 0.25}};
    config.horizon = 30000;
    config.repetitions = 20;
    config.base_seed = 1;
    return config;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::string canonical_config(const RunConfig& config) {
  ordered_json env;
  env["kind"] = config.environment.kind;
  if (config.environment.kind == "dataset") {
    env["items"] = config.environment.items;
    if (!config.environment.keyterms.empty())
      env["keyterms"] = config.environment.keyterms;
    env["graph"] = config.environment.graph;
    env["users"] = config.environment.users;
    env["lambda"] = config.environment.lambda;
    env["sigma"] = config.environment.sigma;
  } else {
    env["num_keyterms"] = config.environment.num_keyterms;
    env["items_per_keyterm"] = config.environment.items_per_keyterm;
    env["lambda"] = config.environment.lambda;
    if (config.environment.kind == "synthetic-contextual") {
      env["sigma"] = config.environment.sigma;
      env["dim_mode"] = config.environment.dim_mode;
      env["dim"] = config.environment.dim;
    }
  }

  ordered_json policies = ordered_json::array();
  for (const PolicySpec& spec : config.policies) {
    ordered_json p;
    p["kind"] = spec.kind;
    if (spec.kind == "hier_ucb" || spec.kind == "hier_linucb")
      p["gamma"] = spec.gamma;
    if (spec.kind == "hier_linucb" || spec.kind == "linucb" ||
        spec.kind == "freqcon_linucb")
      p["alpha"] = spec.alpha;
    policies.push_back(p);
  }

  ordered_json doc;
  doc["environment"] = env;
  doc["policies"] = policies;
  doc["horizon"] = config.horizon;
  doc["repetitions"] = config.repetitions;
  doc["base_seed"] = config.base_seed;
  return doc.dump();
}

std::string config_hash(const RunConfig& config) {
  std::string canonical = canonical_config(config);
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a 64 offset basis
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ULL;  // FNV-1a 64 prime
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buffer);
}

}  // namespace hierband
