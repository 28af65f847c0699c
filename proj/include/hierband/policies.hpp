#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hierband/action.hpp"
#include "hierband/catalog.hpp"
#include "hierband/env.hpp"
#include "hierband/ridge.hpp"

namespace hierband {

/// sqrt(3 ln t / (2 n)); +infinity when n == 0 so an unpulled arm
/// dominates any finite score and is tried first (lowest id on ties).
double ucb_confidence_radius(long t, long n);

/// mean_item - gamma * radius_item >= mean_keyterm + gamma * radius_keyterm.
/// gamma == 0 compares the means alone; with gamma > 0 an infinite radius
/// on either side makes the condition false.
bool switching_condition(double mean_item, double radius_item,
                         double mean_keyterm, double radius_keyterm,
                         double gamma);

/// Cumulative key-term ask budget 10 * floor(log10 t) for the
/// fixed-frequency baseline.
long freqcon_schedule(long t);

/// Per-round state exported for trace logging. `switching` is the truth
/// value of the switching condition at the last evaluation (policies
/// without one report true on item rounds); `pending` marks that a
/// key-term ask still owes its follow-up item recommendation.
struct PolicySnapshot {
  bool switching = true;
  bool pending = false;
};

/// One decision policy driving one episode. select() must be followed by
/// update() with the returned action and the observed reward; the round
/// counter advances once per action.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual bool needs_contexts() const { return false; }
  virtual int num_items() const = 0;
  virtual int num_keyterms() const = 0;
  virtual Action select(const ContextSet& contexts) = 0;
  virtual void update(const Action& action, const ContextSet& contexts,
                      double reward) = 0;
  virtual PolicySnapshot snapshot() const = 0;
};

/// Two-level UCB over key-terms and items with the switching condition
/// and the ask-then-recommend two-step. Bernoulli rewards only.
class HierUcbPolicy : public Policy {
 public:
  HierUcbPolicy(Catalog catalog, double gamma);

  std::string name() const override { return "hier_ucb"; }
  int num_items() const override { return catalog_.num_items(); }
  int num_keyterms() const override { return catalog_.num_keyterms(); }
  Action select(const ContextSet& contexts) override;
  void update(const Action& action, const ContextSet& contexts,
              double reward) override;
  PolicySnapshot snapshot() const override;

  const std::vector<long>& item_counts() const { return item_counts_; }
  const std::vector<double>& item_means() const { return item_means_; }
  const std::vector<long>& keyterm_counts() const { return keyterm_counts_; }
  const std::vector<double>& keyterm_means() const { return keyterm_means_; }
  long round() const { return t_; }

  /// Key-term that won the candidate argmax at the last full evaluation.
  std::optional<int> last_candidate_keyterm() const { return candidate_; }

 private:
  Catalog catalog_;
  double gamma_;
  std::vector<long> item_counts_;
  std::vector<double> item_means_;
  std::vector<long> keyterm_counts_;
  std::vector<double> keyterm_means_;
  long t_ = 1;
  std::optional<int> pending_;
  std::optional<int> candidate_;
  bool switching_ = false;
};

/// Plain UCB over items; never asks key-terms. Bernoulli rewards only.
class UcbPolicy : public Policy {
 public:
  UcbPolicy(Catalog catalog);

  std::string name() const override { return "ucb"; }
  int num_items() const override { return catalog_.num_items(); }
  int num_keyterms() const override { return catalog_.num_keyterms(); }
  Action select(const ContextSet& contexts) override;
  void update(const Action& action, const ContextSet& contexts,
              double reward) override;
  PolicySnapshot snapshot() const override { return {true, false}; }

  const std::vector<long>& item_counts() const { return item_counts_; }
  const std::vector<double>& item_means() const { return item_means_; }
  long round() const { return t_; }

 private:
  Catalog catalog_;
  std::vector<long> item_counts_;
  std::vector<double> item_means_;
  long t_ = 1;
};

/// Two-level LinUCB: separate ridge models for key-term and item
/// feedback, same switching condition and two-step as HierUcbPolicy.
class HierLinUcbPolicy : public Policy {
 public:
  HierLinUcbPolicy(Catalog catalog, int dim, double gamma, double alpha);

  std::string name() const override { return "hier_linucb"; }
  bool needs_contexts() const override { return true; }
  int num_items() const override { return catalog_.num_items(); }
  int num_keyterms() const override { return catalog_.num_keyterms(); }
  Action select(const ContextSet& contexts) override;
  void update(const Action& action, const ContextSet& contexts,
              double reward) override;
  PolicySnapshot snapshot() const override;

  const RidgeState& item_ridge() const { return item_ridge_; }
  const RidgeState& keyterm_ridge() const { return keyterm_ridge_; }
  long round() const { return t_; }

 private:
  Catalog catalog_;
  double gamma_;
  double alpha_;
  RidgeState item_ridge_;
  RidgeState keyterm_ridge_;
  long t_ = 1;
  std::optional<int> pending_;
  bool switching_ = false;
};

/// Non-conversational LinUCB over items only.
class LinUcbPolicy : public Policy {
 public:
  LinUcbPolicy(Catalog catalog, int dim, double alpha);

  std::string name() const override { return "linucb"; }
  bool needs_contexts() const override { return true; }
  int num_items() const override { return catalog_.num_items(); }
  int num_keyterms() const override { return catalog_.num_keyterms(); }
  Action select(const ContextSet& contexts) override;
  void update(const Action& action, const ContextSet& contexts,
              double reward) override;
  PolicySnapshot snapshot() const override { return {true, false}; }

  const RidgeState& ridge() const { return ridge_; }

 private:
  Catalog catalog_;
  double alpha_;
  RidgeState ridge_;
  long t_ = 1;
};

/// Fixed-frequency conversational baseline: asks key-terms until the
/// cumulative budget 10 * floor(log10 t) is spent, otherwise recommends
/// items; one shared ridge absorbs both feedback types (both rewards are
/// linear in the same preference vector).
class FreqConLinUcbPolicy : public Policy {
 public:
  FreqConLinUcbPolicy(Catalog catalog, int dim, double alpha);

  std::string name() const override { return "freqcon_linucb"; }
  bool needs_contexts() const override { return true; }
  int num_items() const override { return catalog_.num_items(); }
  int num_keyterms() const override { return catalog_.num_keyterms(); }
  Action select(const ContextSet& contexts) override;
  void update(const Action& action, const ContextSet& contexts,
              double reward) override;
  PolicySnapshot snapshot() const override { return {last_was_item_, false}; }

  long asks_so_far() const { return asks_; }
  long round() const { return t_; }

 private:
  Catalog catalog_;
  double alpha_;
  RidgeState ridge_;
  long asks_ = 0;
  long t_ = 1;
  bool last_was_item_ = true;
};

}  // namespace hierband
