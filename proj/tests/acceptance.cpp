// Twelve-point acceptance sweep for the toolkit. Each criterion prints one
// PASS/FAIL line with its measured values; the process exits nonzero if any
// criterion fails. Expensive experiment stages are shared: the flagship
// synthetic preset is run twice end to end (ordering, growth, and
// byte-determinism checks all read those artifacts), and the fifty
// hierarchical episodes are streamed once through every per-trace check.
//
// Expected runtime is several minutes, dominated by the feature-based
// policy at dimension 100.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierband/aggregates.hpp"
#include "hierband/commands.hpp"
#include "hierband/config.hpp"
#include "hierband/csv.hpp"
#include "hierband/env.hpp"
#include "hierband/harness.hpp"
#include "hierband/policies.hpp"
#include "hierband/ridge.hpp"
#include "hierband/rng.hpp"

using namespace hierband;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pinned tolerances and thresholds, one place each.
constexpr double kIdentityTol = 1e-9;        // accounting identity slack
constexpr double kRidgeMatchTol = 1e-9;      // incremental vs batch solve
constexpr double kRecoveryTol = 1e-6;        // noiseless recovery target
constexpr double kCoverageFloor = 0.99;      // radius coverage share
constexpr double kSwitchWindowShare = 0.80;  // reps with switch in window
constexpr long kSwitchLow = 200;             // switch-point window
constexpr long kSwitchHigh = 20000;
constexpr double kUnsafeSwitchCap = 0.001;   // premature-commit round share
constexpr double kExactPropertySlack = 1e-12;  // float guard on dominance

struct CriterionResult {
  int id = 0;
  std::string label;
  bool pass = false;
  std::string detail;
};

std::vector<CriterionResult> g_results;

void record(int id, const std::string& label, bool pass,
            const std::string& detail) {
  g_results.push_back({id, label, pass, detail});
  std::fprintf(stderr, "  -> criterion %d %s\n", id, pass ? "pass" : "FAIL");
}

void progress(const std::string& message) {
  std::fprintf(stderr, "[acceptance] %s\n", message.c_str());
  std::fflush(stderr);
}

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------
// Batch CSV reader (header `round,mean_cum_regret,ci_low,ci_high,...`).
// ---------------------------------------------------------------------------

struct BatchCsv {
  std::vector<double> mean;
  std::vector<double> half_width;
};

BatchCsv read_batch_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file");
  BatchCsv out;
  while (std::getline(in, line)) {
    auto fields = csv::split_fields(line);
    if (fields.size() != 5)
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    out.mean.push_back(csv::parse_double(fields[1], path));
    double lo = csv::parse_double(fields[2], path);
    double hi = csv::parse_double(fields[3], path);
    out.half_width.push_back((hi - lo) / 2.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent line-by-line transcriptions of the two-level selection rules,
// kept deliberately free of the policy classes: plain arrays and direct
// matrix inversion only. These are the golden-trace oracles.
// ---------------------------------------------------------------------------

std::vector<Action> transcribe_two_level_tabular(Env& env, double gamma,
                                                 long horizon) {
  const Catalog& catalog = env.catalog();
  const int num_items = catalog.num_items();
  const int num_keyterms = catalog.num_keyterms();
  std::vector<long> item_pulls(num_items, 0), keyterm_pulls(num_keyterms, 0);
  std::vector<double> item_mean(num_items, 1.0),
      keyterm_mean(num_keyterms, 1.0);
  std::vector<Action> actions;
  long t = 1;

  auto radius = [&](long n) {
    return n == 0 ? kInf : std::sqrt(3.0 * std::log(double(t)) / (2.0 * n));
  };

  while (static_cast<long>(actions.size()) < horizon) {
    int kstar = 0;
    double kstar_score = -kInf;
    for (int k = 0; k < num_keyterms; ++k) {
      double s = keyterm_mean[k] + radius(keyterm_pulls[k]);
      if (s > kstar_score) {
        kstar_score = s;
        kstar = k;
      }
    }
    int astar = -1;
    double astar_score = -kInf;
    for (const auto& member : catalog.items_of(kstar)) {
      double s = member.weight *
                 (item_mean[member.id] + radius(item_pulls[member.id]));
      if (s > astar_score) {
        astar_score = s;
        astar = member.id;
      }
    }
    bool commit;
    double ri = radius(item_pulls[astar]);
    double rk = radius(keyterm_pulls[kstar]);
    if (gamma == 0.0)
      commit = item_mean[astar] >= keyterm_mean[kstar];
    else if (std::isinf(ri) || std::isinf(rk))
      commit = false;
    else
      commit =
          item_mean[astar] - gamma * ri >= keyterm_mean[kstar] + gamma * rk;

    if (!commit) {
      Action ask = Action::keyterm(kstar);
      double r = env.step(ask);
      actions.push_back(ask);
      ++keyterm_pulls[kstar];
      keyterm_mean[kstar] += (r - keyterm_mean[kstar]) / keyterm_pulls[kstar];
      ++t;
      if (static_cast<long>(actions.size()) >= horizon) break;
    }
    Action play = Action::item(astar);
    double r = env.step(play);
    actions.push_back(play);
    ++item_pulls[astar];
    item_mean[astar] += (r - item_mean[astar]) / item_pulls[astar];
    ++t;
  }
  actions.resize(static_cast<std::size_t>(horizon));
  return actions;
}

std::vector<Action> transcribe_two_level_linear(Env& env, double gamma,
                                                double alpha, long horizon) {
  const Catalog& catalog = env.catalog();
  ContextSet contexts = env.contexts();
  if (contexts.items == nullptr || contexts.keyterms == nullptr)
    throw std::runtime_error("transcription needs feature contexts");
  const Eigen::MatrixXd& X = *contexts.items;
  const Eigen::MatrixXd& Xk = *contexts.keyterms;
  const int dim = static_cast<int>(X.rows());

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd Mk = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd bk = Eigen::VectorXd::Zero(dim);

  std::vector<Action> actions;
  while (static_cast<long>(actions.size()) < horizon) {
    Eigen::MatrixXd Minv = M.inverse();
    Eigen::MatrixXd Mkinv = Mk.inverse();
    Eigen::VectorXd theta = Minv * b;
    Eigen::VectorXd thetak = Mkinv * bk;

    int kstar = 0;
    double kstar_score = -kInf;
    for (int k = 0; k < Xk.cols(); ++k) {
      Eigen::VectorXd x = Xk.col(k);
      double s = x.dot(thetak) + alpha * std::sqrt(x.dot(Mkinv * x));
      if (s > kstar_score) {
        kstar_score = s;
        kstar = k;
      }
    }
    double proj_kstar = Xk.col(kstar).dot(thetak);
    double rad_kstar =
        alpha * std::sqrt(Xk.col(kstar).dot(Mkinv * Xk.col(kstar)));

    int astar = -1;
    double astar_score = -kInf;
    double proj_astar = 0.0, rad_astar = 0.0;
    for (const auto& member : catalog.items_of(kstar)) {
      Eigen::VectorXd x = X.col(member.id);
      double proj = x.dot(theta);
      double rad = alpha * std::sqrt(x.dot(Minv * x));
      double s = member.weight * (proj + rad);
      if (s > astar_score) {
        astar_score = s;
        astar = member.id;
        proj_astar = proj;
        rad_astar = rad;
      }
    }

    bool commit;
    if (gamma == 0.0)
      commit = proj_astar >= proj_kstar;
    else if (std::isinf(rad_astar) || std::isinf(rad_kstar))
      commit = false;
    else
      commit =
          proj_astar - gamma * rad_astar >= proj_kstar + gamma * rad_kstar;

    if (!commit) {
      Action ask = Action::keyterm(kstar);
      double r = env.step(ask);
      actions.push_back(ask);
      Mk += Xk.col(kstar) * Xk.col(kstar).transpose();
      bk += r * Xk.col(kstar);
      if (static_cast<long>(actions.size()) >= horizon) break;
    }
    Action play = Action::item(astar);
    double r = env.step(play);
    actions.push_back(play);
    M += X.col(astar) * X.col(astar).transpose();
    b += r * X.col(astar);
  }
  actions.resize(static_cast<std::size_t>(horizon));
  return actions;
}

std::vector<Action> drive_policy(Env& env, Policy& policy, long horizon) {
  std::vector<Action> actions;
  ContextSet contexts = env.contexts();
  for (long t = 0; t < horizon; ++t) {
    Action action = policy.select(contexts);
    double reward = env.step(action);
    policy.update(action, contexts, reward);
    actions.push_back(action);
  }
  return actions;
}

// ---------------------------------------------------------------------------
// Accounting-identity accumulator shared by every trace the sweep produces.
// ---------------------------------------------------------------------------

struct IdentityTally {
  long traces = 0;
  double worst_residual = 0.0;

  void add(const EpisodeTrace& trace) {
    long double expected_sum = 0.0L;
    for (const TraceRow& row : trace.rows) expected_sum += row.expected_reward;
    long double lhs = trace.rows.back().cum_regret + expected_sum;
    long double rhs = static_cast<long double>(trace.rows.size()) *
                      trace.optimal_expected_reward;
    double residual = std::fabs(static_cast<double>(lhs - rhs));
    worst_residual = std::max(worst_residual, residual);
    ++traces;
  }
};

int best_keyterm(const Env& env) {
  int best = 0;
  double best_value = -kInf;
  for (int k = 0; k < env.catalog().num_keyterms(); ++k) {
    double value = env.expected_reward(Action::keyterm(k));
    if (value > best_value) {
      best_value = value;
      best = k;
    }
  }
  return best;
}

}  // namespace

int main() {
  std::filesystem::remove_all("/tmp/acceptance");
  std::filesystem::create_directories("/tmp/acceptance");

  IdentityTally identity;

  // =========================================================================
  // Stage A: the flagship synthetic preset, run twice end to end.
  // Feeds criteria 1 (ordering), 3 (slowing growth), 11 (byte determinism).
  // =========================================================================
  RunConfig flagship = preset_config("paper-synthetic");
  const std::uint64_t flagship_base_seed = flagship.base_seed;
  const long flagship_horizon = flagship.horizon;
  const int flagship_reps = flagship.repetitions;

  progress("stage A: flagship preset, first run (slowest stage)");
  flagship.output_dir = "/tmp/acceptance/flagship_a";
  cmd_run(flagship);
  progress("stage A: flagship preset, second run");
  flagship.output_dir = "/tmp/acceptance/flagship_b";
  cmd_run(flagship);

  const std::string kFlagshipFiles[] = {
      "paper-synthetic_hier_ucb.csv", "paper-synthetic_ucb.csv",
      "paper-synthetic_hier_linucb.csv", "paper-synthetic_manifest.json"};

  {
    BatchCsv hier = read_batch_csv_file(
        "/tmp/acceptance/flagship_a/paper-synthetic_hier_ucb.csv");
    BatchCsv flat = read_batch_csv_file(
        "/tmp/acceptance/flagship_a/paper-synthetic_ucb.csv");
    BatchCsv linear = read_batch_csv_file(
        "/tmp/acceptance/flagship_a/paper-synthetic_hier_linucb.csv");

    double h = hier.mean.back(), u = flat.mean.back(), l = linear.mean.back();
    double hw_gap = hier.half_width.back() + flat.half_width.back();
    bool ordering = h < u && h < l;
    bool separated = (u - h) > hw_gap;
    record(1, "two-level beats flat and feature baselines at the final round",
           ordering && separated,
           "hier " + fmt(h) + " vs flat " + fmt(u) + " vs feature " + fmt(l) +
               "; hier/flat gap " + fmt(u - h) + " > CI sum " + fmt(hw_gap));

    std::size_t half = static_cast<std::size_t>(flagship_horizon / 2);
    double first_half = hier.mean[half - 1];
    double second_half = hier.mean.back() - hier.mean[half - 1];
    record(3, "regret growth slows in the second half of the horizon",
           second_half < first_half,
           "first-half increment " + fmt(first_half) +
               ", second-half increment " + fmt(second_half));
  }

  {
    bool all_equal = true;
    std::string compared;
    for (const std::string& name : kFlagshipFiles) {
      std::string a = read_file("/tmp/acceptance/flagship_a/" + name);
      std::string b = read_file("/tmp/acceptance/flagship_b/" + name);
      if (a != b) all_equal = false;
      compared += (compared.empty() ? "" : ", ") + name;
    }
    record(11, "rerunning a preset with the same base seed is byte-identical",
           all_equal, "compared " + compared);
  }

  // =========================================================================
  // Stage B: stream the fifty two-level tabular episodes once. Feeds
  // criteria 2 (switch-point window), 5 (ask-count cap), 8 (identity), and
  // 12 (radius coverage).
  // =========================================================================
  progress("stage B: fifty streamed episodes with per-trace checks");

  long switch_in_window = 0;
  long switch_total_reps = 0;
  long switch_min = std::numeric_limits<long>::max();
  long switch_max = std::numeric_limits<long>::min();
  long asks_all = 0;
  long asks_early = 0;
  long double ask_count_sum = 0.0L;
  long coverage_pairs = 0;
  long coverage_hits = 0;

  // Radius tables shared across repetitions: radius(t, n) = s[t] / sqrt(n).
  std::vector<double> radius_scale(static_cast<std::size_t>(flagship_horizon) +
                                   1);
  std::vector<double> inv_sqrt(static_cast<std::size_t>(flagship_horizon) + 1);
  for (long t = 1; t <= flagship_horizon; ++t)
    radius_scale[static_cast<std::size_t>(t)] =
        std::sqrt(1.5 * std::log(double(t)));
  for (long n = 1; n <= flagship_horizon; ++n)
    inv_sqrt[static_cast<std::size_t>(n)] = 1.0 / std::sqrt(double(n));

  {
    auto reference = build_synthetic_stochastic(
        flagship.environment.num_keyterms, flagship.environment.items_per_keyterm,
        Discount(flagship.environment.lambda), flagship_base_seed);
    const Catalog& catalog = reference.catalog();
    const int num_items = catalog.num_items();
    const int num_keyterms = catalog.num_keyterms();
    const int k_star = best_keyterm(reference);

    std::vector<double> item_truth(static_cast<std::size_t>(num_items));
    std::vector<double> keyterm_truth(static_cast<std::size_t>(num_keyterms));
    for (int a = 0; a < num_items; ++a)
      item_truth[static_cast<std::size_t>(a)] =
          reference.expected_reward(Action::item(a));
    for (int k = 0; k < num_keyterms; ++k)
      keyterm_truth[static_cast<std::size_t>(k)] =
          reference.expected_reward(Action::keyterm(k));

    for (int rep = 0; rep < flagship_reps; ++rep) {
      std::uint64_t seed = flagship_base_seed + static_cast<std::uint64_t>(rep);
      auto env = build_synthetic_stochastic(
          flagship.environment.num_keyterms,
          flagship.environment.items_per_keyterm,
          Discount(flagship.environment.lambda), seed);
      HierUcbPolicy policy(env.catalog(), flagship.policies[0].gamma);
      EpisodeTrace trace = run_episode(env, policy, flagship_horizon, seed);

      // Criterion 2: switch point within the expected window.
      ++switch_total_reps;
      std::optional<long> sp = detect_switch_point(trace);
      if (sp.has_value() && *sp >= kSwitchLow && *sp <= kSwitchHigh)
        ++switch_in_window;
      if (sp.has_value()) {
        switch_min = std::min(switch_min, *sp);
        switch_max = std::max(switch_max, *sp);
      }

      // Criterion 5: asks of the best key term. Alongside, measure how the
      // asks spread over the horizon: the share landing in the first fifth
      // separates "conversation bulk finishes early" from "last ask is late".
      long asks_best = 0;
      for (const TraceRow& row : trace.rows)
        if (row.action.is_keyterm()) {
          ++asks_all;
          if (row.round <= flagship_horizon / 5) ++asks_early;
          if (row.action.id == k_star) ++asks_best;
        }
      ask_count_sum += asks_best;

      // Criterion 8: accounting identity on this trace.
      identity.add(trace);

      // Criterion 12: reconstruct running means from the trace and compare
      // against the truth within the radius, arm by arm, round by round.
      std::vector<double> item_mean(static_cast<std::size_t>(num_items), 0.0);
      std::vector<long> item_n(static_cast<std::size_t>(num_items), 0);
      std::vector<double> key_mean(static_cast<std::size_t>(num_keyterms), 0.0);
      std::vector<long> key_n(static_cast<std::size_t>(num_keyterms), 0);
      for (const TraceRow& row : trace.rows) {
        std::size_t id = static_cast<std::size_t>(row.action.id);
        if (row.action.is_item()) {
          ++item_n[id];
          item_mean[id] += (row.reward - item_mean[id]) / item_n[id];
        } else {
          ++key_n[id];
          key_mean[id] += (row.reward - key_mean[id]) / key_n[id];
        }
        double scale = radius_scale[static_cast<std::size_t>(row.round)];
        for (int a = 0; a < num_items; ++a) {
          std::size_t i = static_cast<std::size_t>(a);
          if (item_n[i] == 0) continue;
          ++coverage_pairs;
          double rho = scale * inv_sqrt[static_cast<std::size_t>(item_n[i])];
          if (std::fabs(item_mean[i] - item_truth[i]) <= rho) ++coverage_hits;
        }
        for (int k = 0; k < num_keyterms; ++k) {
          std::size_t i = static_cast<std::size_t>(k);
          if (key_n[i] == 0) continue;
          ++coverage_pairs;
          double rho = scale * inv_sqrt[static_cast<std::size_t>(key_n[i])];
          if (std::fabs(key_mean[i] - keyterm_truth[i]) <= rho)
            ++coverage_hits;
        }
      }
    }

    double share = double(switch_in_window) / double(switch_total_reps);
    double early_share = asks_all > 0 ? double(asks_early) / double(asks_all)
                                      : 0.0;
    record(2, "switch point lands in the expected window",
           share >= kSwitchWindowShare,
           std::to_string(switch_in_window) + "/" +
               std::to_string(switch_total_reps) + " repetitions in [" +
               std::to_string(kSwitchLow) + ", " + std::to_string(kSwitchHigh) +
               "] (need >= " + fmt(kSwitchWindowShare * 100) +
               "%); observed last-ask rounds span [" +
               std::to_string(switch_min) + ", " + std::to_string(switch_max) +
               "] while " + fmt(early_share * 100) +
               "% of asks land in the first fifth of the horizon: the growing "
               "radius re-asks sparsely forever, so the final ask drifts to "
               "the horizon even though conversation bulk ends early");

    // Criterion 5: theoretical cap on asks of the best key term, evaluated
    // with the true gaps of this instance.
    double gamma = flagship.policies[0].gamma;
    double log_horizon = std::log(double(flagship_horizon));
    double mu_best_item = reference.optimal().first;
    Action best_item_action = reference.optimal().second;
    double top_gap =
        mu_best_item - keyterm_truth[static_cast<std::size_t>(k_star)];
    double cap = 6.0 * (gamma + 1.0) * (gamma + 1.0) * log_horizon /
                 (top_gap * top_gap);
    for (const auto& member : catalog.items_of(k_star)) {
      if (member.id == best_item_action.id) continue;
      double gap =
          mu_best_item - item_truth[static_cast<std::size_t>(member.id)];
      cap += 6.0 * log_horizon / (gap * gap);
    }
    double mean_asks = static_cast<double>(ask_count_sum) / flagship_reps;
    record(5, "asks of the best key term stay under the theoretical cap",
           mean_asks <= cap,
           "mean asks " + fmt(mean_asks) + " <= cap " + fmt(cap));

    double coverage = double(coverage_hits) / double(coverage_pairs);
    record(12, "confidence radii cover the true means",
           coverage >= kCoverageFloor,
           fmt(coverage * 100) + "% of " + std::to_string(coverage_pairs) +
               " (arm, round) pairs (need >= " + fmt(kCoverageFloor * 100) +
               "%)");
  }

  // =========================================================================
  // Criterion 4: with the safety margin set from the true gaps, the policy
  // must essentially never commit while its candidate key term is not the
  // best one.
  // =========================================================================
  progress("criterion 4: oversized safety margin, fifty instrumented runs");
  {
    auto reference = build_synthetic_stochastic(
        flagship.environment.num_keyterms, flagship.environment.items_per_keyterm,
        Discount(flagship.environment.lambda), flagship_base_seed);
    const Catalog& catalog = reference.catalog();
    const int k_star = best_keyterm(reference);
    double mu_best_item = reference.optimal().first;

    double worst_ratio = 0.0;
    for (int k = 0; k < catalog.num_keyterms(); ++k) {
      if (k == k_star) continue;
      double best_member = -kInf;
      for (const auto& member : catalog.items_of(k))
        best_member = std::max(
            best_member, reference.expected_reward(Action::item(member.id)));
      double item_gap = mu_best_item - best_member;
      double keyterm_gap =
          reference.expected_reward(Action::keyterm(k_star)) -
          reference.expected_reward(Action::keyterm(k));
      worst_ratio = std::max(worst_ratio, item_gap / keyterm_gap);
    }
    double safe_gamma = worst_ratio + 1.01;

    long rounds = 0;
    long premature = 0;
    for (int rep = 0; rep < flagship_reps; ++rep) {
      std::uint64_t seed = flagship_base_seed + static_cast<std::uint64_t>(rep);
      auto env = build_synthetic_stochastic(
          flagship.environment.num_keyterms,
          flagship.environment.items_per_keyterm,
          Discount(flagship.environment.lambda), seed);
      env.reseed(seed);
      HierUcbPolicy policy(env.catalog(), safe_gamma);
      for (long t = 0; t < flagship_horizon; ++t) {
        Action action = policy.select({});
        if (policy.snapshot().switching &&
            policy.last_candidate_keyterm().value_or(k_star) != k_star)
          ++premature;
        double reward = env.step(action);
        policy.update(action, {}, reward);
        ++rounds;
      }
    }
    double share = double(premature) / double(rounds);
    record(4, "oversized safety margin never commits on the wrong key term",
           share <= kUnsafeSwitchCap,
           "margin " + fmt(safe_gamma) + "; " + std::to_string(premature) +
               " premature commits in " + std::to_string(rounds) +
               " rounds (" + fmt(share * 100) + "%, cap " +
               fmt(kUnsafeSwitchCap * 100) + "%)");
  }

  // =========================================================================
  // Criterion 6: golden traces against the independent transcriptions.
  // =========================================================================
  progress("criterion 6: golden traces");
  {
    auto env = build_synthetic_stochastic(2, 2, Discount(0.5), 4242);
    auto oracle_env = env.clone();
    env.reseed(4242);
    oracle_env->reseed(4242);
    HierUcbPolicy policy(env.catalog(), 1.0);
    auto actual = drive_policy(env, policy, 10);
    auto expected = transcribe_two_level_tabular(*oracle_env, 1.0, 10);
    long tabular_mismatches = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
      if (!(actual[i] == expected[i])) ++tabular_mismatches;

    auto lin_env =
        build_synthetic_contextual(2, 2, DimMode::kOneHot, Discount(0.5), 0.0, 7);
    auto lin_oracle = lin_env.clone();
    HierLinUcbPolicy lin_policy(lin_env.catalog(), 4, 1.0, 1.0);
    auto lin_actual = drive_policy(lin_env, lin_policy, 12);
    auto lin_expected = transcribe_two_level_linear(*lin_oracle, 1.0, 1.0, 12);
    long linear_mismatches = 0;
    for (std::size_t i = 0; i < lin_actual.size(); ++i)
      if (!(lin_actual[i] == lin_expected[i])) ++linear_mismatches;

    record(6, "golden traces match the independent transcriptions exactly",
           tabular_mismatches == 0 && linear_mismatches == 0,
           "tabular 10/10 actions, " +
               std::to_string(10 - tabular_mismatches) + " matched; linear " +
               "12/12 actions, " + std::to_string(12 - linear_mismatches) +
               " matched");

    // Both golden episodes also feed the accounting identity, replayed
    // through the instrumented runner.
    auto env_trace = build_synthetic_stochastic(2, 2, Discount(0.5), 4242);
    HierUcbPolicy policy_trace(env_trace.catalog(), 1.0);
    identity.add(run_episode(env_trace, policy_trace, 10, 4242));
    auto lin_env_trace =
        build_synthetic_contextual(2, 2, DimMode::kOneHot, Discount(0.5), 0.0, 7);
    HierLinUcbPolicy lin_policy_trace(lin_env_trace.catalog(), 4, 1.0, 1.0);
    identity.add(run_episode(lin_env_trace, lin_policy_trace, 12, 7));
  }

  // =========================================================================
  // Criterion 7: ridge kernel. Incremental vs batch, then noiseless
  // recovery after one hundred passes over the standard basis.
  // =========================================================================
  progress("criterion 7: ridge kernel checks");
  {
    const int d = 20;
    Rng rng(314159);
    RidgeState state(d);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd moment = Eigen::VectorXd::Zero(d);
    double worst_coordinate_gap = 0.0;
    for (int update = 0; update < 1000; ++update) {
      Eigen::VectorXd x = rng.unit_sphere(d);
      double reward = 2.0 * rng.uniform01() - 1.0;
      state.update(x, reward);
      gram += x * x.transpose();
      moment += reward * x;
      Eigen::VectorXd batch = gram.ldlt().solve(moment);
      worst_coordinate_gap = std::max(
          worst_coordinate_gap,
          (state.estimate() - batch).cwiseAbs().maxCoeff());
    }
    bool incremental_matches = worst_coordinate_gap <= kRidgeMatchTol;

    Eigen::VectorXd theta_star = rng.unit_sphere(d);
    RidgeState recovery(d);
    for (int pass = 0; pass < 100; ++pass)
      for (int i = 0; i < d; ++i) {
        Eigen::VectorXd x = Eigen::VectorXd::Unit(d, i);
        recovery.update(x, x.dot(theta_star));
      }
    double recovery_error =
        (recovery.estimate() - theta_star).cwiseAbs().maxCoeff();
    bool recovered = recovery_error <= kRecoveryTol;

    record(7, "ridge kernel: incremental matches batch; noiseless recovery",
           incremental_matches && recovered,
           "incremental-vs-batch worst coordinate gap " +
               fmt(worst_coordinate_gap) + " (tol " + fmt(kRidgeMatchTol) +
               "); recovery error after 100 basis passes " +
               fmt(recovery_error) + " vs target " + fmt(kRecoveryTol) +
               " -- the unit regularizer shrinks each coordinate by 100/101," +
               " leaving |theta*|_inf/101 = " +
               fmt(theta_star.cwiseAbs().maxCoeff() / 101.0) +
               ", so the target would need ~10^6 passes");
  }

  // =========================================================================
  // Criterion 9: generated-dataset ordering at desk scale.
  // =========================================================================
  progress("criterion 9: generated dataset, three feature policies");
  {
    const std::string dir = "/tmp/acceptance/dataset";
    cmd_generate_dataset(DatasetSpec{20, 200, 20, 20}, 2026, dir);
    DatasetPaths paths;
    paths.items = dir + "/items.csv";
    paths.graph = dir + "/graph.csv";
    paths.users = dir + "/users.csv";
    // Discount 1.0 is the two-level policy's most favorable setting (asking
    // the best key term is then regret-free) and the closest to the
    // representative-item reading of key-term rewards; the observed ordering
    // below is unchanged at 0.9 and 0.5.
    auto envs = std::make_shared<std::vector<ContextualEnv>>(
        load_dataset_env(paths, Discount(1.0), 0.1));

    const std::uint64_t base_seed = 1;
    const long horizon = 30000;
    const int reps = 20;
    const double gamma = 0.5;
    const double alpha = 0.25;
    const int dim = 20;
    const Catalog catalog = (*envs)[0].catalog();

    EnvBuilder env_builder = [envs, base_seed](std::uint64_t seed) {
      return (*envs)[static_cast<std::size_t>((seed - base_seed) %
                                              envs->size())]
          .clone();
    };

    auto run_policy = [&](const std::string& name) {
      PolicyBuilder policy_builder = [&, name](std::uint64_t) {
        std::unique_ptr<Policy> policy;
        if (name == "hier_linucb")
          policy = std::make_unique<HierLinUcbPolicy>(catalog, dim, gamma,
                                                      alpha);
        else if (name == "linucb")
          policy = std::make_unique<LinUcbPolicy>(catalog, dim, alpha);
        else
          policy = std::make_unique<FreqConLinUcbPolicy>(catalog, dim, alpha);
        return policy;
      };
      return run_batch(env_builder, policy_builder, horizon, reps, base_seed);
    };

    progress("criterion 9: two-level feature policy");
    BatchResult hier = run_policy("hier_linucb");
    progress("criterion 9: flat feature baseline");
    BatchResult flat = run_policy("linucb");
    progress("criterion 9: fixed-schedule conversational baseline");
    BatchResult scheduled = run_policy("freqcon_linucb");

    double h = hier.mean_cum_regret.back();
    double l = flat.mean_cum_regret.back();
    double f = scheduled.mean_cum_regret.back();
    double hw_h = hier.ci_half_width.back();
    double hw_l = flat.ci_half_width.back();
    double hw_f = scheduled.ci_half_width.back();
    bool ordering = h < l && h < f;
    bool separated = (l - h) > (hw_h + hw_l) && (f - h) > (hw_h + hw_f);
    std::string detail = "two-level " + fmt(h) + "+-" + fmt(hw_h) +
                         " vs flat " + fmt(l) + "+-" + fmt(hw_l) +
                         " vs scheduled " + fmt(f) + "+-" + fmt(hw_f) +
                         " at the most favorable discount 1.0";
    if (!(ordering && separated))
      detail +=
          "; with random balanced membership the key-term restriction "
          "carries no feature structure, so the scheduled shared-model "
          "baseline collects the conversational lift instead";
    record(9, "two-level feature policy wins on the generated dataset",
           ordering && separated, detail);

    // A pair of desk-size traces from the remaining policy kinds also feeds
    // the accounting identity, so every policy contributes a checked trace.
    LinUcbPolicy flat_policy(catalog, dim, alpha);
    identity.add(run_episode(*(*envs)[0].clone(), flat_policy, 5000, 77));
    FreqConLinUcbPolicy scheduled_policy(catalog, dim, alpha);
    identity.add(
        run_episode(*(*envs)[1].clone(), scheduled_policy, 5000, 78));
    auto flat_tabular_env = build_synthetic_stochastic(10, 10, Discount(0.5), 5);
    UcbPolicy flat_tabular(flat_tabular_env.catalog());
    identity.add(run_episode(flat_tabular_env, flat_tabular, 5000, 5));
  }

  record(8, "accounting identity holds on every trace",
         identity.worst_residual <= kIdentityTol,
         "worst residual " + fmt(identity.worst_residual) + " over " +
             std::to_string(identity.traces) + " traces (tol " +
             fmt(kIdentityTol) + ")");

  // =========================================================================
  // Criterion 10: aggregate dominance and exact-equality properties.
  // =========================================================================
  progress("criterion 10: aggregate properties");
  {
    Rng rng(987);
    long dominance_violations = 0;
    long full_share_mismatches = 0;
    long equal_weight_mismatches = 0;
    const double alphas[] = {0.2, 0.5, 0.8, 1.0};
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 1 + int(rng.uniform01() * 30);
      std::vector<double> ratings, unit_weights;
      for (int i = 0; i < n; ++i) {
        ratings.push_back(1.0 + 4.0 * rng.uniform01());
        unit_weights.push_back(1.0);
      }
      double simple = simple_average(ratings);
      for (double alpha : alphas)
        if (top_alpha_average(ratings, alpha) + kExactPropertySlack < simple)
          ++dominance_violations;
      if (top_alpha_average(ratings, 1.0) != simple) ++full_share_mismatches;
      if (weighted_average(ratings, unit_weights) != simple)
        ++equal_weight_mismatches;
    }

    long closeness_violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      int n = 4 + int(rng.uniform01() * 12);
      std::vector<double> ratings, weights;
      for (int i = 0; i < n; ++i) {
        ratings.push_back(1.0 + 4.0 * double(i) / double(n - 1));
        weights.push_back(double((i + 1) * (i + 1)));
      }
      double w = weighted_average(ratings, weights);
      double top_half = top_alpha_average(ratings, 0.5);
      double simple = simple_average(ratings);
      if (std::fabs(w - top_half) > std::fabs(w - simple) + kExactPropertySlack)
        ++closeness_violations;
    }

    record(10, "aggregate dominance and exact-equality properties",
           dominance_violations == 0 && full_share_mismatches == 0 &&
               equal_weight_mismatches == 0 && closeness_violations == 0,
           "dominance violations " + std::to_string(dominance_violations) +
               "/4000; full-share mismatches " +
               std::to_string(full_share_mismatches) +
               "/1000; equal-weight mismatches " +
               std::to_string(equal_weight_mismatches) +
               "/1000; weighted-closeness violations " +
               std::to_string(closeness_violations) + "/100");
  }

  // =========================================================================
  // Report.
  // =========================================================================
  std::sort(g_results.begin(), g_results.end(),
            [](const CriterionResult& a, const CriterionResult& b) {
              return a.id < b.id;
            });
  int passed = 0;
  for (const CriterionResult& result : g_results) {
    std::printf("[%s] criterion %2d: %s — %s\n",
                result.pass ? "PASS" : "FAIL", result.id, result.label.c_str(),
                result.detail.c_str());
    if (result.pass) ++passed;
  }
  std::printf("%d/%d criteria passed\n", passed,
              static_cast<int>(g_results.size()));
  return passed == static_cast<int>(g_results.size()) ? 0 : 1;
}
