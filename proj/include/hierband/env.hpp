#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hierband/action.hpp"
#include "hierband/catalog.hpp"
#include "hierband/rng.hpp"

namespace hierband {

/// Discount applied when a key-term answer stands in for an item rating.
/// Valid range is (0, 1].
struct Discount {
  double value;
  explicit Discount(double v);
};

/// Feature views handed to contextual policies each round. Columns are
/// indexed by item / key-term id. Null members mean "no features".
struct ContextSet {
  const Eigen::MatrixXd* items = nullptr;
  const Eigen::MatrixXd* keyterms = nullptr;
};

/// A simulated user. step() draws a stochastic reward for the chosen
/// action; expected_reward() exposes the ground truth for regret
/// accounting. Every environment satisfies the structural assumption
/// checked by check_hierarchy(): the best item belongs to the best
/// key-term's member set.
class Env {
 public:
  virtual ~Env() = default;

  virtual const Catalog& catalog() const = 0;
  virtual double step(const Action& action) = 0;
  virtual double expected_reward(const Action& action) const = 0;
  virtual ContextSet contexts() const { return {}; }
  virtual void reseed(std::uint64_t seed) = 0;
  virtual std::unique_ptr<Env> clone() const = 0;

  /// Best expected reward over all actions and the action achieving it.
  /// Ties break toward the lowest-id item, then the lowest-id key-term.
  std::pair<double, Action> optimal() const;
};

/// Per-action Bernoulli rewards with fixed means. Carries one-hot
/// features (see attach_onehot_contexts) so contextual policies can run
/// against the same user.
class StochasticEnv : public Env {
 public:
  /// Means must lie in [0, 1]; the catalog must validate cleanly.
  StochasticEnv(Catalog catalog, std::vector<double> item_means,
                std::vector<double> keyterm_means, std::uint64_t seed);

  const Catalog& catalog() const override { return catalog_; }
  double step(const Action& action) override;
  double expected_reward(const Action& action) const override;
  ContextSet contexts() const override;
  void reseed(std::uint64_t seed) override { rng_.reseed(seed); }
  std::unique_ptr<Env> clone() const override;

  /// Builds features with d = num_items: item a gets the basis vector
  /// e_a, the preference vector is the item-mean vector, and key-term k
  /// gets (mu~_k / mu_a') e_a' where a' maximizes weight * mean over the
  /// member set — so feature-model expected rewards equal the Bernoulli
  /// means exactly. Fails if some key-term mean cannot be represented
  /// with a unit-ball feature.
  void attach_onehot_contexts();

  const std::vector<double>& item_means() const { return item_means_; }
  const std::vector<double>& keyterm_means() const { return keyterm_means_; }

 private:
  Catalog catalog_;
  std::vector<double> item_means_;
  std::vector<double> keyterm_means_;
  Rng rng_;
  std::optional<Eigen::MatrixXd> item_contexts_;
  std::optional<Eigen::MatrixXd> keyterm_contexts_;
};

/// Linear rewards: expected reward of action x is x . theta*, observed
/// rewards add Gaussian noise of standard deviation noise_sigma.
class ContextualEnv : public Env {
 public:
  /// All feature columns must fit in the unit ball (tolerance 1e-9),
  /// every expected reward must lie in [-1, 1], and dimensions must
  /// agree with the catalog.
  ContextualEnv(Catalog catalog, Eigen::VectorXd theta_star,
                Eigen::MatrixXd item_contexts, Eigen::MatrixXd keyterm_contexts,
                double noise_sigma, std::uint64_t seed);

  const Catalog& catalog() const override { return catalog_; }
  double step(const Action& action) override;
  double expected_reward(const Action& action) const override;
  ContextSet contexts() const override;
  void reseed(std::uint64_t seed) override { rng_.reseed(seed); }
  std::unique_ptr<Env> clone() const override;

  const Eigen::VectorXd& theta_star() const { return theta_star_; }
  double noise_sigma() const { return noise_sigma_; }

 private:
  Catalog catalog_;
  Eigen::VectorXd theta_star_;
  Eigen::MatrixXd item_contexts_;
  Eigen::MatrixXd keyterm_contexts_;
  double noise_sigma_;
  Rng rng_;
};

/// mu~_k = lambda * max over members of (weight * item mean).
std::vector<double> derive_keyterm_means(const Catalog& catalog,
                                         const std::vector<double>& item_means,
                                         Discount lambda);

/// Throws std::invalid_argument unless the best key-term's member set
/// contains an item matching the best item mean (tolerance 1e-12).
/// "Best" follows the lowest-id tie-break of Env::optimal().
void check_hierarchy(const Catalog& catalog,
                     const std::vector<double>& item_means,
                     const std::vector<double>& keyterm_means);

/// num_keyterms blocks of items_per_keyterm items each; item i (0-based,
/// global) is a member of block i / items_per_keyterm only, and has mean
/// (i + 1) / num_items. Key-term means follow derive_keyterm_means;
/// one-hot features are attached.
StochasticEnv build_synthetic_stochastic(int num_keyterms,
                                         int items_per_keyterm,
                                         Discount lambda, std::uint64_t seed);

enum class DimMode { kOneHot, kRandomUnit };

/// Same block structure as the stochastic builder. One-hot mode: d equals
/// the item count, item i's feature is e_i, theta* grades items as
/// (i + 1) / num_items. Random-unit mode: theta* and the item features
/// are uniform unit-sphere draws (dimension `dim`, or the item count if
/// dim == 0), with items re-labeled so expected rewards increase with
/// item id. Key-term k's feature is lambda times the feature of its
/// best member.
ContextualEnv build_synthetic_contextual(int num_keyterms,
                                         int items_per_keyterm, DimMode mode,
                                         Discount lambda, double noise_sigma,
                                         std::uint64_t seed, int dim = 0);

struct DatasetPaths {
  std::string items;                   // item_id,f0,...
  std::optional<std::string> keyterms; // keyterm_id,f0,... (else derived)
  std::string graph;                   // item_id,keyterm_id[,weight]
  std::string users;                   // user_id,f0,... (one env per user)
};

/// One environment per user row, ordered by user id. Without a key-term
/// file, key-term features are derived per user by the
/// build_synthetic_contextual rule. Every environment must satisfy the
/// hierarchy check; file problems raise errors naming file and line.
std::vector<ContextualEnv> load_dataset_env(const DatasetPaths& paths,
                                            Discount lambda,
                                            double noise_sigma);

}  // namespace hierband
