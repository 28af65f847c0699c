#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hierband/action.hpp"
#include "hierband/env.hpp"
#include "hierband/policies.hpp"

namespace hierband {

/// One logged round: the action taken, the sampled and expected rewards,
/// the pseudo-regret bookkeeping, and the policy snapshot at selection.
struct TraceRow {
  long round = 0;  // 1-based
  Action action;
  double reward = 0.0;
  double expected_reward = 0.0;
  double regret_inc = 0.0;
  double cum_regret = 0.0;
  bool switching = false;
  bool pending = false;
};

struct EpisodeTrace {
  std::string policy_name;
  std::uint64_t seed = 0;
  double optimal_expected_reward = 0.0;
  std::vector<TraceRow> rows;  // exactly the horizon length
};

/// Pointwise aggregates over repetitions, plus per-repetition summaries
/// used by the experiment reports.
struct BatchResult {
  long horizon = 0;
  int repetitions = 0;
  std::vector<std::uint64_t> seeds;              // one per repetition
  std::vector<double> mean_cum_regret;           // length horizon
  std::vector<double> ci_half_width;             // length horizon, 95% normal
  std::vector<double> mean_avg_reward;           // length horizon
  std::vector<std::optional<long>> switch_points;  // one per repetition
  std::vector<double> final_cum_regret;          // one per repetition
};

using EnvBuilder = std::function<std::unique_ptr<Env>(std::uint64_t seed)>;
using PolicyBuilder =
    std::function<std::unique_ptr<Policy>(std::uint64_t seed)>;

/// Runs exactly `horizon` rounds of select -> step -> update -> log after
/// reseeding the environment. Regret increments are pseudo-regret: the
/// environment's optimal expected reward minus the expected reward of the
/// chosen action. Throws if the policy and environment disagree on
/// catalog sizes or on the need for feature contexts.
EpisodeTrace run_episode(Env& env, Policy& policy, long horizon,
                         std::uint64_t seed);

/// Runs `repetitions` episodes; repetition i builds its environment and
/// policy with seed base_seed + i. Aggregates are accumulated in
/// repetition order, so the result is deterministic for a given
/// (base_seed, builders) regardless of scheduling.
BatchResult run_batch(const EnvBuilder& env_builder,
                      const PolicyBuilder& policy_builder, long horizon,
                      int repetitions, std::uint64_t base_seed);

/// First round after which no key-term action occurs again: the round of
/// the last key-term ask, 0 for an all-item trace, and empty when the
/// trace ends on a key-term (the asks never stopped).
std::optional<long> detect_switch_point(const EpisodeTrace& trace);

/// mean +/- z * s / sqrt(n) with z the two-sided normal critical value
/// for the level and s the (n-1)-denominator sample standard deviation.
/// A single sample gives the degenerate interval at its value.
std::pair<double, double> confidence_interval(
    const std::vector<double>& samples, double level);

/// Two-sided normal critical value: Phi^{-1}((1 + level) / 2).
double normal_critical_value(double level);

/// Trace CSV:
/// round,action_type,action_id,reward,expected_reward,regret_inc,
/// cum_regret,switching,pending
void write_trace_csv(std::ostream& out, const EpisodeTrace& trace);
void write_trace_csv(const std::string& path, const EpisodeTrace& trace);
EpisodeTrace read_trace_csv(std::istream& in, const std::string& name);
EpisodeTrace read_trace_csv(const std::string& path);

/// Batch CSV: round,mean_cum_regret,ci_low,ci_high,mean_avg_reward
void write_batch_csv(std::ostream& out, const BatchResult& batch);
void write_batch_csv(const std::string& path, const BatchResult& batch);

}  // namespace hierband
