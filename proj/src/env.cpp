#include "hierband/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hierband/csv.hpp"

namespace hierband {
namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kTieTolerance = 1e-12;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_valid(const Catalog& catalog) {
  auto problems = catalog.validate();
  if (problems.empty()) return;
  std::string joined = "invalid catalog: " + problems.front();
  for (std::size_t i = 1; i < problems.size(); ++i)
    joined += "; " + problems[i];
  throw std::invalid_argument(joined);
}

void require_unit_ball(const Eigen::VectorXd& v, const std::string& name) {
  require(v.allFinite(), name + " has non-finite entries");
  require(v.norm() <= 1.0 + kNormTolerance,
          name + " lies outside the unit ball (norm " +
              std::to_string(v.norm()) + ")");
}

int argmax_lowest(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace

Discount::Discount(double v) : value(v) {
  require(std::isfinite(v) && v > 0.0 && v <= 1.0,
          "discount must lie in (0, 1], got " + std::to_string(v));
}

std::pair<double, Action> Env::optimal() const {
  const Catalog& cat = catalog();
  Action best_action = Action::item(0);
  double best = expected_reward(best_action);
  for (int a = 1; a < cat.num_items(); ++a) {
    double value = expected_reward(Action::item(a));
    if (value > best) {
      best = value;
      best_action = Action::item(a);
    }
  }
  for (int k = 0; k < cat.num_keyterms(); ++k) {
    double value = expected_reward(Action::keyterm(k));
    if (value > best) {
      best = value;
      best_action = Action::keyterm(k);
    }
  }
  return {best, best_action};
}

StochasticEnv::StochasticEnv(Catalog catalog, std::vector<double> item_means,
                             std::vector<double> keyterm_means,
                             std::uint64_t seed)
    : catalog_(std::move(catalog)),
      item_means_(std::move(item_means)),
      keyterm_means_(std::move(keyterm_means)),
      rng_(seed) {
  require_valid(catalog_);
  require(static_cast<int>(item_means_.size()) == catalog_.num_items(),
          "item mean count does not match the catalog");
  require(static_cast<int>(keyterm_means_.size()) == catalog_.num_keyterms(),
          "key-term mean count does not match the catalog");
  auto in_unit = [](double m) { return std::isfinite(m) && m >= 0.0 && m <= 1.0; };
  for (double m : item_means_)
    require(in_unit(m), "item means must lie in [0, 1]");
  for (double m : keyterm_means_)
    require(in_unit(m), "key-term means must lie in [0, 1]");
  check_hierarchy(catalog_, item_means_, keyterm_means_);
}

double StochasticEnv::step(const Action& action) {
  return rng_.bernoulli(expected_reward(action));
}

double StochasticEnv::expected_reward(const Action& action) const {
  if (action.is_item()) {
    require(action.id >= 0 && action.id < catalog_.num_items(),
            "item id out of range: " + std::to_string(action.id));
    return item_means_[static_cast<std::size_t>(action.id)];
  }
  require(action.id >= 0 && action.id < catalog_.num_keyterms(),
          "key-term id out of range: " + std::to_string(action.id));
  return keyterm_means_[static_cast<std::size_t>(action.id)];
}

ContextSet StochasticEnv::contexts() const {
  if (!item_contexts_) return {};
  return {&*item_contexts_, &*keyterm_contexts_};
}

std::unique_ptr<Env> StochasticEnv::clone() const {
  return std::make_unique<StochasticEnv>(*this);
}

void StochasticEnv::attach_onehot_contexts() {
  int n = catalog_.num_items();
  int num_k = catalog_.num_keyterms();
  item_contexts_ = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd keyterms = Eigen::MatrixXd::Zero(n, num_k);
  for (int k = 0; k < num_k; ++k) {
    const auto& members = catalog_.items_of(k);
    int anchor = members.front().id;
    double anchor_value =
        members.front().weight * item_means_[static_cast<std::size_t>(anchor)];
    for (const auto& member : members) {
      double value =
          member.weight * item_means_[static_cast<std::size_t>(member.id)];
      if (value > anchor_value) {
        anchor_value = value;
        anchor = member.id;
      }
    }
    double mean = keyterm_means_[static_cast<std::size_t>(k)];
    double anchor_mean = item_means_[static_cast<std::size_t>(anchor)];
    if (mean == 0.0) continue;  // zero feature, zero expected reward
    require(anchor_mean > 0.0 && mean <= anchor_mean * (1.0 + kTieTolerance),
            "key-term " + std::to_string(k) +
                " mean cannot be represented with a unit-ball feature");
    keyterms(anchor, k) = std::min(mean / anchor_mean, 1.0);
  }
  keyterm_contexts_ = std::move(keyterms);
}

ContextualEnv::ContextualEnv(Catalog catalog, Eigen::VectorXd theta_star,
                             Eigen::MatrixXd item_contexts,
                             Eigen::MatrixXd keyterm_contexts,
                             double noise_sigma, std::uint64_t seed)
    : catalog_(std::move(catalog)),
      theta_star_(std::move(theta_star)),
      item_contexts_(std::move(item_contexts)),
      keyterm_contexts_(std::move(keyterm_contexts)),
      noise_sigma_(noise_sigma),
      rng_(seed) {
  require_valid(catalog_);
  require(std::isfinite(noise_sigma_) && noise_sigma_ >= 0.0,
          "noise sigma must be nonnegative");
  int d = static_cast<int>(theta_star_.size());
  require(d >= 1, "preference vector is empty");
  require(item_contexts_.rows() == d && keyterm_contexts_.rows() == d,
          "feature dimension does not match the preference vector");
  require(item_contexts_.cols() == catalog_.num_items(),
          "item feature count does not match the catalog");
  require(keyterm_contexts_.cols() == catalog_.num_keyterms(),
          "key-term feature count does not match the catalog");
  require(theta_star_.allFinite(), "preference vector has non-finite entries");
  for (int a = 0; a < item_contexts_.cols(); ++a)
    require_unit_ball(item_contexts_.col(a), "item " + std::to_string(a));
  for (int k = 0; k < keyterm_contexts_.cols(); ++k)
    require_unit_ball(keyterm_contexts_.col(k),
                      "key-term " + std::to_string(k));

  // Expected rewards must stay in [-1, 1]. A unit-norm preference vector
  // guarantees this, but graded one-hot preferences (entry i holds the
  // i-th item mean) exceed unit norm while still bounding every reward,
  // so the check targets the rewards themselves.
  std::vector<double> item_means(static_cast<std::size_t>(item_contexts_.cols()));
  for (int a = 0; a < item_contexts_.cols(); ++a) {
    item_means[static_cast<std::size_t>(a)] =
        item_contexts_.col(a).dot(theta_star_);
    require(std::abs(item_means[static_cast<std::size_t>(a)]) <=
                1.0 + kNormTolerance,
            "expected reward of item " + std::to_string(a) +
                " lies outside [-1, 1]");
  }
  std::vector<double> keyterm_means(
      static_cast<std::size_t>(keyterm_contexts_.cols()));
  for (int k = 0; k < keyterm_contexts_.cols(); ++k) {
    keyterm_means[static_cast<std::size_t>(k)] =
        keyterm_contexts_.col(k).dot(theta_star_);
    require(std::abs(keyterm_means[static_cast<std::size_t>(k)]) <=
                1.0 + kNormTolerance,
            "expected reward of key-term " + std::to_string(k) +
                " lies outside [-1, 1]");
  }
  check_hierarchy(catalog_, item_means, keyterm_means);
}

double ContextualEnv::step(const Action& action) {
  return expected_reward(action) + rng_.gaussian(noise_sigma_);
}

double ContextualEnv::expected_reward(const Action& action) const {
  if (action.is_item()) {
    require(action.id >= 0 && action.id < catalog_.num_items(),
            "item id out of range: " + std::to_string(action.id));
    return item_contexts_.col(action.id).dot(theta_star_);
  }
  require(action.id >= 0 && action.id < catalog_.num_keyterms(),
          "key-term id out of range: " + std::to_string(action.id));
  return keyterm_contexts_.col(action.id).dot(theta_star_);
}

ContextSet ContextualEnv::contexts() const {
  return {&item_contexts_, &keyterm_contexts_};
}

std::unique_ptr<Env> ContextualEnv::clone() const {
  return std::make_unique<ContextualEnv>(*this);
}

std::vector<double> derive_keyterm_means(const Catalog& catalog,
                                         const std::vector<double>& item_means,
                                         Discount lambda) {
  require(static_cast<int>(item_means.size()) == catalog.num_items(),
          "item mean count does not match the catalog");
  std::vector<double> means(static_cast<std::size_t>(catalog.num_keyterms()));
  for (int k = 0; k < catalog.num_keyterms(); ++k) {
    const auto& members = catalog.items_of(k);
    require(!members.empty(),
            "key-term " + std::to_string(k) + " has no member items");
    double best = 0.0;
    bool first = true;
    for (const auto& member : members) {
      double value =
          member.weight * item_means[static_cast<std::size_t>(member.id)];
      if (first || value > best) best = value;
      first = false;
    }
    means[static_cast<std::size_t>(k)] = lambda.value * best;
  }
  return means;
}

void check_hierarchy(const Catalog& catalog,
                     const std::vector<double>& item_means,
                     const std::vector<double>& keyterm_means) {
  require(!item_means.empty() && !keyterm_means.empty(),
          "cannot check an empty environment");
  int best_item = argmax_lowest(item_means);
  int best_keyterm = argmax_lowest(keyterm_means);
  double target = item_means[static_cast<std::size_t>(best_item)];
  for (const auto& member : catalog.items_of(best_keyterm))
    if (item_means[static_cast<std::size_t>(member.id)] >=
        target - kTieTolerance)
      return;
  throw std::invalid_argument(
      "best item " + std::to_string(best_item) +
      " is not reachable from best key-term " + std::to_string(best_keyterm));
}

namespace {

Catalog block_catalog(int num_keyterms, int items_per_keyterm) {
  require(num_keyterms >= 1 && items_per_keyterm >= 1,
          "block sizes must be positive");
  std::vector<CatalogEdge> edges;
  edges.reserve(static_cast<std::size_t>(num_keyterms) *
                static_cast<std::size_t>(items_per_keyterm));
  for (int k = 0; k < num_keyterms; ++k)
    for (int j = 0; j < items_per_keyterm; ++j)
      edges.push_back({k * items_per_keyterm + j, k, 1.0});
  return Catalog(num_keyterms * items_per_keyterm, num_keyterms,
                 std::move(edges));
}

std::vector<double> graded_means(int num_items) {
  std::vector<double> means(static_cast<std::size_t>(num_items));
  for (int i = 0; i < num_items; ++i)
    means[static_cast<std::size_t>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(num_items);
  return means;
}

}  // namespace

StochasticEnv build_synthetic_stochastic(int num_keyterms,
                                         int items_per_keyterm,
                                         Discount lambda, std::uint64_t seed) {
  Catalog catalog = block_catalog(num_keyterms, items_per_keyterm);
  auto item_means = graded_means(catalog.num_items());
  auto keyterm_means = derive_keyterm_means(catalog, item_means, lambda);
  StochasticEnv env(std::move(catalog), std::move(item_means),
                    std::move(keyterm_means), seed);
  env.attach_onehot_contexts();
  return env;
}

ContextualEnv build_synthetic_contextual(int num_keyterms,
                                         int items_per_keyterm, DimMode mode,
                                         Discount lambda, double noise_sigma,
                                         std::uint64_t seed, int dim) {
  Catalog catalog = block_catalog(num_keyterms, items_per_keyterm);
  int n = catalog.num_items();

  Eigen::VectorXd theta;
  Eigen::MatrixXd items;
  if (mode == DimMode::kOneHot) {
    require(dim == 0 || dim == n,
            "one-hot mode fixes the dimension to the item count");
    auto means = graded_means(n);
    theta = Eigen::Map<const Eigen::VectorXd>(means.data(), n);
    items = Eigen::MatrixXd::Identity(n, n);
  } else {
    int d = dim == 0 ? n : dim;
    require(d >= 1, "dimension must be positive");
    Rng rng(seed);
    theta = rng.unit_sphere(d);
    items.resize(d, n);
    for (int a = 0; a < n; ++a) items.col(a) = rng.unit_sphere(d);
    // Re-label items so expected rewards increase with item id.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Eigen::VectorXd projections = items.transpose() * theta;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return projections(a) < projections(b);
    });
    Eigen::MatrixXd sorted(d, n);
    for (int a = 0; a < n; ++a)
      sorted.col(a) = items.col(order[static_cast<std::size_t>(a)]);
    items = std::move(sorted);
  }

  Eigen::VectorXd projections = items.transpose() * theta;
  Eigen::MatrixXd keyterms(items.rows(), catalog.num_keyterms());
  for (int k = 0; k < catalog.num_keyterms(); ++k) {
    const auto& members = catalog.items_of(k);
    int anchor = members.front().id;
    for (const auto& member : members)
      if (projections(member.id) > projections(anchor)) anchor = member.id;
    keyterms.col(k) = lambda.value * items.col(anchor);
  }

  return ContextualEnv(std::move(catalog), std::move(theta), std::move(items),
                       std::move(keyterms), noise_sigma, seed);
}

std::vector<ContextualEnv> load_dataset_env(const DatasetPaths& paths,
                                            Discount lambda,
                                            double noise_sigma) {
  auto items = csv::read_context_csv(paths.items, "item_id");
  auto users = csv::read_context_csv(paths.users, "user_id");
  if (users.dim != items.dim)
    throw std::runtime_error(paths.users + ": feature dimension " +
                             std::to_string(users.dim) + " does not match " +
                             paths.items + " (dimension " +
                             std::to_string(items.dim) + ")");

  std::optional<csv::ContextTable> keyterms;
  if (paths.keyterms) {
    keyterms = csv::read_context_csv(*paths.keyterms, "keyterm_id");
    if (keyterms->dim != items.dim)
      throw std::runtime_error(*paths.keyterms + ": feature dimension " +
                               std::to_string(keyterms->dim) +
                               " does not match " + paths.items +
                               " (dimension " + std::to_string(items.dim) +
                               ")");
  }

  auto graph = csv::read_graph_csv(paths.graph);
  if (graph.edges.empty())
    throw std::runtime_error(paths.graph + ": no membership edges");
  int num_items = static_cast<int>(items.features.cols());
  int num_keyterms = 0;
  for (const auto& edge : graph.edges)
    num_keyterms = std::max(num_keyterms, edge.keyterm + 1);
  if (keyterms) num_keyterms = static_cast<int>(keyterms->features.cols());
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const auto& edge = graph.edges[i];
    std::string where =
        paths.graph + ":" + std::to_string(graph.lines[i]);
    if (edge.item < 0 || edge.item >= num_items)
      throw std::runtime_error(where + ": item id " +
                               std::to_string(edge.item) + " out of range");
    if (edge.keyterm < 0 || edge.keyterm >= num_keyterms)
      throw std::runtime_error(where + ": keyterm id " +
                               std::to_string(edge.keyterm) + " out of range");
    if (edge.weight < 0.0)
      throw std::runtime_error(where + ": negative weight");
  }

  Catalog catalog = [&]() -> Catalog {
    try {
      return normalize_weights(num_items, num_keyterms, graph.edges);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(paths.graph + ": " + e.what());
    }
  }();

  std::vector<ContextualEnv> envs;
  int num_users = static_cast<int>(users.features.cols());
  envs.reserve(static_cast<std::size_t>(num_users));
  for (int u = 0; u < num_users; ++u) {
    Eigen::VectorXd theta = users.features.col(u);
    Eigen::MatrixXd keyterm_contexts;
    if (keyterms) {
      keyterm_contexts = keyterms->features;
    } else {
      Eigen::VectorXd projections = items.features.transpose() * theta;
      keyterm_contexts.setZero(items.dim, catalog.num_keyterms());
      for (int k = 0; k < catalog.num_keyterms(); ++k) {
        const auto& members = catalog.items_of(k);
        int anchor = members.front().id;
        for (const auto& member : members)
          if (projections(member.id) > projections(anchor)) anchor = member.id;
        keyterm_contexts.col(k) = lambda.value * items.features.col(anchor);
      }
    }
    try {
      envs.emplace_back(catalog, std::move(theta), items.features,
                        std::move(keyterm_contexts), noise_sigma,
                        /*seed=*/0);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(paths.users + ": user " + std::to_string(u) +
                               ": " + e.what());
    }
  }
  return envs;
}

}  // namespace hierband
