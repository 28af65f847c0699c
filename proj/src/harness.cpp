#include "hierband/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hierband/csv.hpp"

namespace hierband {
namespace {

// Two-sided 95% normal critical value, pinned for batch aggregation.
constexpr double kZ95 = 1.959963984540054;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  return out;
}

}  // namespace

EpisodeTrace run_episode(Env& env, Policy& policy, long horizon,
                         std::uint64_t seed) {
  require(horizon >= 1, "horizon must be at least 1");
  require(policy.num_items() == env.catalog().num_items() &&
              policy.num_keyterms() == env.catalog().num_keyterms(),
          "policy built for " + std::to_string(policy.num_items()) + "x" +
              std::to_string(policy.num_keyterms()) +
              " does not match the environment catalog " +
              std::to_string(env.catalog().num_items()) + "x" +
              std::to_string(env.catalog().num_keyterms()));
  ContextSet contexts = env.contexts();
  require(!policy.needs_contexts() ||
              (contexts.items != nullptr && contexts.keyterms != nullptr),
          "policy needs feature contexts but the environment provides none");

  env.reseed(seed);
  double optimal = env.optimal().first;

  EpisodeTrace trace;
  trace.policy_name = policy.name();
  trace.seed = seed;
  trace.optimal_expected_reward = optimal;
  trace.rows.reserve(static_cast<std::size_t>(horizon));

  // Accumulate in extended precision so the stored running total stays
  // faithful to the per-round increments over very long horizons.
  long double cum_regret = 0.0L;
  for (long round = 1; round <= horizon; ++round) {
    Action action = policy.select(contexts);
    PolicySnapshot snap = policy.snapshot();
    double reward = env.step(action);
    policy.update(action, contexts, reward);

    TraceRow row;
    row.round = round;
    row.action = action;
    row.reward = reward;
    row.expected_reward = env.expected_reward(action);
    row.regret_inc = optimal - row.expected_reward;
    cum_regret += static_cast<long double>(row.regret_inc);
    row.cum_regret = static_cast<double>(cum_regret);
    row.switching = snap.switching;
    row.pending = snap.pending;
    trace.rows.push_back(row);
  }
  return trace;
}

BatchResult run_batch(const EnvBuilder& env_builder,
                      const PolicyBuilder& policy_builder, long horizon,
                      int repetitions, std::uint64_t base_seed) {
  require(horizon >= 1, "horizon must be at least 1");
  require(repetitions >= 1, "repetitions must be at least 1");

  BatchResult batch;
  batch.horizon = horizon;
  batch.repetitions = repetitions;
  std::size_t h = static_cast<std::size_t>(horizon);
  batch.mean_cum_regret.assign(h, 0.0);
  batch.ci_half_width.assign(h, 0.0);
  batch.mean_avg_reward.assign(h, 0.0);

  // Streaming mean/variance per round across repetitions, in repetition
  // order so the result does not depend on scheduling.
  std::vector<double> regret_m2(h, 0.0);

  for (int rep = 0; rep < repetitions; ++rep) {
    std::uint64_t seed = base_seed + static_cast<std::uint64_t>(rep);
    auto env = env_builder(seed);
    auto policy = policy_builder(seed);
    EpisodeTrace trace = run_episode(*env, *policy, horizon, seed);

    double reward_sum = 0.0;
    double n = rep + 1;
    for (std::size_t i = 0; i < h; ++i) {
      const TraceRow& row = trace.rows[i];
      double delta = row.cum_regret - batch.mean_cum_regret[i];
      batch.mean_cum_regret[i] += delta / n;
      regret_m2[i] += delta * (row.cum_regret - batch.mean_cum_regret[i]);

      reward_sum += row.reward;
      double avg_reward = reward_sum / static_cast<double>(i + 1);
      batch.mean_avg_reward[i] += (avg_reward - batch.mean_avg_reward[i]) / n;
    }

    batch.seeds.push_back(seed);
    batch.switch_points.push_back(detect_switch_point(trace));
    batch.final_cum_regret.push_back(trace.rows.back().cum_regret);
  }

  if (repetitions > 1) {
    double n = repetitions;
    for (std::size_t i = 0; i < h; ++i) {
      double variance = regret_m2[i] / (n - 1.0);
      batch.ci_half_width[i] =
          kZ95 * std::sqrt(variance < 0.0 ? 0.0 : variance) / std::sqrt(n);
    }
  }
  return batch;
}

std::optional<long> detect_switch_point(const EpisodeTrace& trace) {
  if (trace.rows.empty()) return 0;
  if (trace.rows.back().action.is_keyterm()) return std::nullopt;
  for (auto it = trace.rows.rbegin(); it != trace.rows.rend(); ++it)
    if (it->action.is_keyterm()) return it->round;
  return 0;
}

double normal_critical_value(double level) {
  require(std::isfinite(level) && level > 0.0 && level < 1.0,
          "confidence level must lie strictly between 0 and 1");
  // Solve erf(z / sqrt(2)) = level by bisection; erf is monotone.
  double lo = 0.0, hi = 40.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (std::erf(mid / std::sqrt(2.0)) < level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> confidence_interval(
    const std::vector<double>& samples, double level) {
  require(!samples.empty(), "confidence interval needs at least one sample");
  double z = normal_critical_value(level);
  double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  if (samples.size() == 1) return {mean, mean};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  double s = std::sqrt(ss / (n - 1.0));
  double half = z * s / std::sqrt(n);
  return {mean - half, mean + half};
}

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << "round,action_type,action_id,reward,expected_reward,regret_inc,"
         "cum_regret,switching,pending\n";
  for (const TraceRow& row : trace.rows) {
    out << row.round << ',' << (row.action.is_item() ? "item" : "keyterm")
        << ',' << row.action.id << ',' << csv::format_double_exact(row.reward)
        << ',' << csv::format_double_exact(row.expected_reward) << ','
        << csv::format_double_exact(row.regret_inc) << ','
        << csv::format_double_exact(row.cum_regret) << ','
        << (row.switching ? 1 : 0) << ',' << (row.pending ? 1 : 0) << '\n';
  }
}

void write_trace_csv(const std::string& path, const EpisodeTrace& trace) {
  auto out = open_out(path);
  write_trace_csv(out, trace);
}

EpisodeTrace read_trace_csv(std::istream& in, const std::string& name) {
  auto fail = [&](int line, const std::string& msg) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int line_no = 0;
  EpisodeTrace trace;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line !=
          "round,action_type,action_id,reward,expected_reward,regret_inc,"
          "cum_regret,switching,pending")
        fail(line_no, "unexpected header '" + line + "'");
      saw_header = true;
      continue;
    }
    auto fields = csv::split_fields(line);
    if (fields.size() != 9) fail(line_no, "expected 9 fields");
    std::string where = name + ":" + std::to_string(line_no);
    TraceRow row;
    row.round = csv::parse_id(fields[0], where);
    if (fields[1] == "item")
      row.action = Action::item(static_cast<int>(csv::parse_id(fields[2], where)));
    else if (fields[1] == "keyterm")
      row.action =
          Action::keyterm(static_cast<int>(csv::parse_id(fields[2], where)));
    else
      fail(line_no, "unknown action type '" + fields[1] + "'");
    row.reward = csv::parse_double(fields[3], where);
    row.expected_reward = csv::parse_double(fields[4], where);
    row.regret_inc = csv::parse_double(fields[5], where);
    row.cum_regret = csv::parse_double(fields[6], where);
    if (fields[7] != "0" && fields[7] != "1")
      fail(line_no, "switching flag must be 0 or 1");
    if (fields[8] != "0" && fields[8] != "1")
      fail(line_no, "pending flag must be 0 or 1");
    row.switching = fields[7] == "1";
    row.pending = fields[8] == "1";
    long expected_round = static_cast<long>(trace.rows.size()) + 1;
    if (row.round != expected_round)
      fail(line_no, "round " + std::to_string(row.round) +
                        " out of order (expected " +
                        std::to_string(expected_round) + ")");
    trace.rows.push_back(row);
  }
  if (!saw_header) throw std::runtime_error(name + ": empty file");
  if (!trace.rows.empty())
    trace.optimal_expected_reward =
        trace.rows.front().expected_reward + trace.rows.front().regret_inc;
  return trace;
}

EpisodeTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return read_trace_csv(in, path);
}

void write_batch_csv(std::ostream& out, const BatchResult& batch) {
  out << "round,mean_cum_regret,ci_low,ci_high,mean_avg_reward\n";
  for (long round = 1; round <= batch.horizon; ++round) {
    std::size_t i = static_cast<std::size_t>(round - 1);
    double mean = batch.mean_cum_regret[i];
    double half = batch.ci_half_width[i];
    out << round << ',' << csv::format_double_exact(mean) << ','
        << csv::format_double_exact(mean - half) << ','
        << csv::format_double_exact(mean + half) << ','
        << csv::format_double_exact(batch.mean_avg_reward[i]) << '\n';
  }
}

void write_batch_csv(const std::string& path, const BatchResult& batch) {
  auto out = open_out(path);
  write_batch_csv(out, batch);
}

}  // namespace hierband
