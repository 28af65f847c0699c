#include "hierband/ridge.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hierband {
namespace {

// Rank-one inverse updates accumulate rounding drift; a fresh
// factorization this often keeps estimates well inside the residual
// contract at negligible cost.
constexpr int kRefreshInterval = 512;

}  // namespace

RidgeState::RidgeState(int dim) {
  if (dim < 1)
    throw std::invalid_argument("ridge dimension must be positive, got " +
                                std::to_string(dim));
  gram_ = Eigen::MatrixXd::Identity(dim, dim);
  moment_ = Eigen::VectorXd::Zero(dim);
  inverse_ = Eigen::MatrixXd::Identity(dim, dim);
  estimate_ = Eigen::VectorXd::Zero(dim);
  estimate_fresh_ = true;
}

void RidgeState::update(const Eigen::VectorXd& x, double reward) {
  if (x.size() != moment_.size())
    throw std::invalid_argument(
        "feature dimension " + std::to_string(x.size()) +
        " does not match ridge dimension " + std::to_string(moment_.size()));
  if (!x.allFinite() || !std::isfinite(reward))
    throw std::invalid_argument("ridge update with non-finite input");

  gram_.noalias() += x * x.transpose();
  moment_.noalias() += reward * x;
  ++count_;
  estimate_fresh_ = false;

  if (++updates_since_refresh_ >= kRefreshInterval) {
    refresh_inverse();
    return;
  }
  // Sherman-Morrison: (M + x xT)^-1 = M^-1 - (M^-1 x)(M^-1 x)T / (1 + xT M^-1 x).
  Eigen::VectorXd u = inverse_ * x;
  inverse_.noalias() -= u * (u.transpose() / (1.0 + x.dot(u)));
}

void RidgeState::refresh_inverse() {
  inverse_ = gram_.llt().solve(
      Eigen::MatrixXd::Identity(gram_.rows(), gram_.cols()));
  updates_since_refresh_ = 0;
}

const Eigen::VectorXd& RidgeState::estimate() const {
  if (!estimate_fresh_) {
    estimate_.noalias() = inverse_ * moment_;
    estimate_fresh_ = true;
  }
  return estimate_;
}

double RidgeState::ucb_radius(const Eigen::VectorXd& x, double alpha) const {
  if (x.size() != moment_.size())
    throw std::invalid_argument(
        "feature dimension " + std::to_string(x.size()) +
        " does not match ridge dimension " + std::to_string(moment_.size()));
  double quad = x.dot(inverse_ * x);
  return alpha * std::sqrt(std::max(quad, 0.0));
}

Eigen::VectorXd RidgeState::ucb_radii(const Eigen::MatrixXd& xs,
                                      double alpha) const {
  if (xs.rows() != moment_.size())
    throw std::invalid_argument(
        "feature dimension " + std::to_string(xs.rows()) +
        " does not match ridge dimension " + std::to_string(moment_.size()));
  Eigen::MatrixXd product = inverse_ * xs;
  Eigen::VectorXd quad =
      (xs.array() * product.array()).colwise().sum().transpose();
  return alpha * quad.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace hierband
