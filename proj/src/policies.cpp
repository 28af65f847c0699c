#include "hierband/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hierband {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_valid_catalog(const Catalog& catalog) {
  auto problems = catalog.validate();
  require(problems.empty(),
          problems.empty() ? "" : "invalid catalog: " + problems.front());
}

void require_param(double value, const char* name) {
  require(std::isfinite(value) && value >= 0.0,
          std::string(name) + " must be finite and nonnegative");
}

void require_bernoulli_reward(double reward) {
  require(reward >= 0.0 && reward <= 1.0,
          "reward " + std::to_string(reward) + " outside [0, 1]");
}

void require_item_in_range(const Action& action, int num_items,
                           int num_keyterms) {
  if (action.is_item())
    require(action.id >= 0 && action.id < num_items,
            "item id out of range: " + std::to_string(action.id));
  else
    require(action.id >= 0 && action.id < num_keyterms,
            "key-term id out of range: " + std::to_string(action.id));
}

// Lowest index wins ties; infinities compare naturally.
int argmax_lowest(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int i = 1; i < scores.size(); ++i)
    if (scores(i) > scores(best)) best = i;
  return best;
}

void check_contexts(const ContextSet& contexts, int dim, int num_items,
                    int num_keyterms) {
  require(contexts.items != nullptr && contexts.keyterms != nullptr,
          "policy needs item and key-term features but the environment "
          "provides none");
  require(contexts.items->rows() == dim && contexts.keyterms->rows() == dim,
          "feature dimension does not match the policy dimension " +
              std::to_string(dim));
  require(contexts.items->cols() == num_items,
          "item feature count does not match the catalog");
  require(contexts.keyterms->cols() == num_keyterms,
          "key-term feature count does not match the catalog");
}

}  // namespace

double ucb_confidence_radius(long t, long n) {
  require(t >= 1, "round must be at least 1");
  require(n >= 0, "pull count must be nonnegative");
  if (n == 0) return kInf;
  return std::sqrt(3.0 * std::log(static_cast<double>(t)) /
                   (2.0 * static_cast<double>(n)));
}

bool switching_condition(double mean_item, double radius_item,
                         double mean_keyterm, double radius_keyterm,
                         double gamma) {
  if (gamma == 0.0) return mean_item >= mean_keyterm;
  if (std::isinf(radius_item) || std::isinf(radius_keyterm)) return false;
  return mean_item - gamma * radius_item >= mean_keyterm + gamma * radius_keyterm;
}

long freqcon_schedule(long t) {
  require(t >= 1, "round must be at least 1");
  long decades = 0;
  while (t >= 10) {
    t /= 10;
    ++decades;
  }
  return 10 * decades;
}

HierUcbPolicy::HierUcbPolicy(Catalog catalog, double gamma)
    : catalog_(std::move(catalog)), gamma_(gamma) {
  require_valid_catalog(catalog_);
  require_param(gamma_, "gamma");
  item_counts_.assign(static_cast<std::size_t>(catalog_.num_items()), 0);
  item_means_.assign(static_cast<std::size_t>(catalog_.num_items()), 1.0);
  keyterm_counts_.assign(static_cast<std::size_t>(catalog_.num_keyterms()), 0);
  keyterm_means_.assign(static_cast<std::size_t>(catalog_.num_keyterms()), 1.0);
}

Action HierUcbPolicy::select(const ContextSet&) {
  if (pending_) {
    Action action = Action::item(*pending_);
    pending_.reset();
    return action;
  }

  int best_k = 0;
  double best_k_score = -kInf;
  for (int k = 0; k < catalog_.num_keyterms(); ++k) {
    double score =
        keyterm_means_[static_cast<std::size_t>(k)] +
        ucb_confidence_radius(t_, keyterm_counts_[static_cast<std::size_t>(k)]);
    if (score > best_k_score) {
      best_k_score = score;
      best_k = k;
    }
  }

  const auto& members = catalog_.items_of(best_k);
  int best_a = members.front().id;
  double best_a_score = -kInf;
  double best_a_radius = kInf;
  for (const auto& member : members) {
    double radius = ucb_confidence_radius(
        t_, item_counts_[static_cast<std::size_t>(member.id)]);
    double score =
        member.weight *
        (item_means_[static_cast<std::size_t>(member.id)] + radius);
    if (score > best_a_score) {
      best_a_score = score;
      best_a = member.id;
      best_a_radius = radius;
    }
  }

  candidate_ = best_k;
  switching_ = switching_condition(
      item_means_[static_cast<std::size_t>(best_a)], best_a_radius,
      keyterm_means_[static_cast<std::size_t>(best_k)],
      ucb_confidence_radius(t_,
                            keyterm_counts_[static_cast<std::size_t>(best_k)]),
      gamma_);
  if (!switching_) {
    pending_ = best_a;
    return Action::keyterm(best_k);
  }
  return Action::item(best_a);
}

void HierUcbPolicy::update(const Action& action, const ContextSet&,
                           double reward) {
  require_item_in_range(action, catalog_.num_items(), catalog_.num_keyterms());
  require_bernoulli_reward(reward);
  if (action.is_item()) {
    long& count = item_counts_[static_cast<std::size_t>(action.id)];
    double& mean = item_means_[static_cast<std::size_t>(action.id)];
    ++count;
    mean += (reward - mean) / static_cast<double>(count);
  } else {
    long& count = keyterm_counts_[static_cast<std::size_t>(action.id)];
    double& mean = keyterm_means_[static_cast<std::size_t>(action.id)];
    ++count;
    mean += (reward - mean) / static_cast<double>(count);
  }
  ++t_;
}

PolicySnapshot HierUcbPolicy::snapshot() const {
  return {switching_, pending_.has_value()};
}

UcbPolicy::UcbPolicy(Catalog catalog) : catalog_(std::move(catalog)) {
  require_valid_catalog(catalog_);
  item_counts_.assign(static_cast<std::size_t>(catalog_.num_items()), 0);
  item_means_.assign(static_cast<std::size_t>(catalog_.num_items()), 1.0);
}

Action UcbPolicy::select(const ContextSet&) {
  int best = 0;
  double best_score = -kInf;
  for (int a = 0; a < catalog_.num_items(); ++a) {
    double score =
        item_means_[static_cast<std::size_t>(a)] +
        ucb_confidence_radius(t_, item_counts_[static_cast<std::size_t>(a)]);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return Action::item(best);
}

void UcbPolicy::update(const Action& action, const ContextSet&, double reward) {
  require(action.is_item(), "item-only policy saw a key-term action");
  require_item_in_range(action, catalog_.num_items(), catalog_.num_keyterms());
  require_bernoulli_reward(reward);
  long& count = item_counts_[static_cast<std::size_t>(action.id)];
  double& mean = item_means_[static_cast<std::size_t>(action.id)];
  ++count;
  mean += (reward - mean) / static_cast<double>(count);
  ++t_;
}

HierLinUcbPolicy::HierLinUcbPolicy(Catalog catalog, int dim, double gamma,
                                   double alpha)
    : catalog_(std::move(catalog)),
      gamma_(gamma),
      alpha_(alpha),
      item_ridge_(dim),
      keyterm_ridge_(dim) {
  require_valid_catalog(catalog_);
  require_param(gamma_, "gamma");
  require_param(alpha_, "alpha");
}

Action HierLinUcbPolicy::select(const ContextSet& contexts) {
  if (pending_) {
    Action action = Action::item(*pending_);
    pending_.reset();
    return action;
  }
  check_contexts(contexts, item_ridge_.dim(), catalog_.num_items(),
                 catalog_.num_keyterms());

  const Eigen::VectorXd& theta_k = keyterm_ridge_.estimate();
  Eigen::VectorXd keyterm_proj = contexts.keyterms->transpose() * theta_k;
  Eigen::VectorXd keyterm_radii =
      keyterm_ridge_.ucb_radii(*contexts.keyterms, alpha_);
  int best_k = argmax_lowest(keyterm_proj + keyterm_radii);

  const auto& members = catalog_.items_of(best_k);
  Eigen::MatrixXd member_contexts(item_ridge_.dim(),
                                  static_cast<int>(members.size()));
  for (int j = 0; j < static_cast<int>(members.size()); ++j)
    member_contexts.col(j) =
        contexts.items->col(members[static_cast<std::size_t>(j)].id);

  const Eigen::VectorXd& theta_a = item_ridge_.estimate();
  Eigen::VectorXd member_proj = member_contexts.transpose() * theta_a;
  Eigen::VectorXd member_radii = item_ridge_.ucb_radii(member_contexts, alpha_);
  int best_j = 0;
  double best_score = -kInf;
  for (int j = 0; j < static_cast<int>(members.size()); ++j) {
    double score = members[static_cast<std::size_t>(j)].weight *
                   (member_proj(j) + member_radii(j));
    if (score > best_score) {
      best_score = score;
      best_j = j;
    }
  }
  int best_a = members[static_cast<std::size_t>(best_j)].id;

  switching_ =
      switching_condition(member_proj(best_j), member_radii(best_j),
                          keyterm_proj(best_k), keyterm_radii(best_k), gamma_);
  if (!switching_) {
    pending_ = best_a;
    return Action::keyterm(best_k);
  }
  return Action::item(best_a);
}

void HierLinUcbPolicy::update(const Action& action, const ContextSet& contexts,
                              double reward) {
  check_contexts(contexts, item_ridge_.dim(), catalog_.num_items(),
                 catalog_.num_keyterms());
  require_item_in_range(action, catalog_.num_items(), catalog_.num_keyterms());
  if (action.is_item())
    item_ridge_.update(contexts.items->col(action.id), reward);
  else
    keyterm_ridge_.update(contexts.keyterms->col(action.id), reward);
  ++t_;
}

PolicySnapshot HierLinUcbPolicy::snapshot() const {
  return {switching_, pending_.has_value()};
}

LinUcbPolicy::LinUcbPolicy(Catalog catalog, int dim, double alpha)
    : catalog_(std::move(catalog)), alpha_(alpha), ridge_(dim) {
  require_valid_catalog(catalog_);
  require_param(alpha_, "alpha");
}

Action LinUcbPolicy::select(const ContextSet& contexts) {
  check_contexts(contexts, ridge_.dim(), catalog_.num_items(),
                 catalog_.num_keyterms());
  const Eigen::VectorXd& theta = ridge_.estimate();
  Eigen::VectorXd proj = contexts.items->transpose() * theta;
  Eigen::VectorXd radii = ridge_.ucb_radii(*contexts.items, alpha_);
  return Action::item(argmax_lowest(proj + radii));
}

void LinUcbPolicy::update(const Action& action, const ContextSet& contexts,
                          double reward) {
  require(action.is_item(), "item-only policy saw a key-term action");
  check_contexts(contexts, ridge_.dim(), catalog_.num_items(),
                 catalog_.num_keyterms());
  require_item_in_range(action, catalog_.num_items(), catalog_.num_keyterms());
  ridge_.update(contexts.items->col(action.id), reward);
  ++t_;
}

FreqConLinUcbPolicy::FreqConLinUcbPolicy(Catalog catalog, int dim, double alpha)
    : catalog_(std::move(catalog)), alpha_(alpha), ridge_(dim) {
  require_valid_catalog(catalog_);
  require_param(alpha_, "alpha");
}

Action FreqConLinUcbPolicy::select(const ContextSet& contexts) {
  check_contexts(contexts, ridge_.dim(), catalog_.num_items(),
                 catalog_.num_keyterms());
  const Eigen::VectorXd& theta = ridge_.estimate();
  if (asks_ < freqcon_schedule(t_)) {
    ++asks_;
    last_was_item_ = false;
    Eigen::VectorXd proj = contexts.keyterms->transpose() * theta;
    Eigen::VectorXd radii = ridge_.ucb_radii(*contexts.keyterms, alpha_);
    return Action::keyterm(argmax_lowest(proj + radii));
  }
  last_was_item_ = true;
  Eigen::VectorXd proj = contexts.items->transpose() * theta;
  Eigen::VectorXd radii = ridge_.ucb_radii(*contexts.items, alpha_);
  return Action::item(argmax_lowest(proj + radii));
}

void FreqConLinUcbPolicy::update(const Action& action,
                                 const ContextSet& contexts, double reward) {
  check_contexts(contexts, ridge_.dim(), catalog_.num_items(),
                 catalog_.num_keyterms());
  require_item_in_range(action, catalog_.num_items(), catalog_.num_keyterms());
  if (action.is_item())
    ridge_.update(contexts.items->col(action.id), reward);
  else
    ridge_.update(contexts.keyterms->col(action.id), reward);
  ++t_;
}

}  // namespace hierband
