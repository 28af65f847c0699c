#pragma once

#include <Eigen/Dense>

namespace hierband {

/// Incremental ridge regression with unit regularizer: gram = I + sum of
/// x xT, moment = sum of r x. The inverse gram is maintained by rank-one
/// updates and re-factorized periodically, so estimates satisfy
/// |gram * estimate - moment|_inf <= 1e-9 * (1 + |moment|_inf) while
/// updates and radius queries stay O(d^2).
class RidgeState {
 public:
  explicit RidgeState(int dim);

  int dim() const { return static_cast<int>(moment_.size()); }
  int observation_count() const { return count_; }

  void update(const Eigen::VectorXd& x, double reward);

  /// Solution of gram * theta = moment.
  const Eigen::VectorXd& estimate() const;

  /// alpha * sqrt(xT gram^-1 x).
  double ucb_radius(const Eigen::VectorXd& x, double alpha) const;

  /// Radius for every column of xs at once.
  Eigen::VectorXd ucb_radii(const Eigen::MatrixXd& xs, double alpha) const;

  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& moment() const { return moment_; }

 private:
  void refresh_inverse();

  Eigen::MatrixXd gram_;
  Eigen::VectorXd moment_;
  Eigen::MatrixXd inverse_;
  int count_ = 0;
  int updates_since_refresh_ = 0;
  mutable Eigen::VectorXd estimate_;
  mutable bool estimate_fresh_ = false;
};

}  // namespace hierband
