#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hierband {

/// Seeded random stream used by all environments.
///
/// Every sampling method consumes a fixed number of engine outputs
/// (uniform01 and bernoulli one, gaussian two), so call sequences map to
/// engine states one-to-one and runs replay exactly under the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  void reseed(std::uint64_t seed) { engine_.seed(seed); }

  /// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// One Bernoulli(p) trial as 0.0 / 1.0. Consumes one draw.
  double bernoulli(double p) { return uniform01() < p ? 1.0 : 0.0; }

  /// Gaussian(0, sigma^2) via Box-Muller. Always consumes two draws,
  /// including when sigma == 0, so noiseless runs stay stream-compatible
  /// with noisy ones.
  double gaussian(double sigma) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * M_PI * u2);
    return sigma * z;
  }

  /// Uniform point on the unit sphere in R^dim.
  Eigen::VectorXd unit_sphere(int dim) {
    Eigen::VectorXd v(dim);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = gaussian(1.0);
      norm2 = v.squaredNorm();
    } while (norm2 < 1e-24);
    return v / std::sqrt(norm2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hierband
