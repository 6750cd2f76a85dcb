#pragma once

#include "omtclust/core.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omtclust {

/// splitmix64 step, used only to expand a 64-bit seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** seeded by four consecutive splitmix64 outputs.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

/// Standard normals by Box-Muller; both values of each pair are used, cosine first.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - rng_.uniform();  // (0, 1]
    const double u2 = rng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    hasSpare_ = true;
    return radius * std::cos(angle);
  }

 private:
  Xoshiro256 rng_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

struct MixtureConfig {
  std::vector<Eigen::VectorXd> means;
  Eigen::VectorXd covarianceDiagonal;
  std::size_t samplesPerComponent = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (means.empty()) throw std::invalid_argument("MixtureConfig: no components");
    const auto d = means.front().size();
    for (const auto& m : means)
      if (m.size() != d) throw std::invalid_argument("MixtureConfig: means differ in dimension");
    if (covarianceDiagonal.size() != d)
      throw std::invalid_argument("MixtureConfig: covariance dimension differs from means");
    if (!(covarianceDiagonal.array() > 0.0).all())
      throw std::invalid_argument("MixtureConfig: variances must be positive");
    if (samplesPerComponent < 1) throw std::invalid_argument("MixtureConfig: samplesPerComponent must be >= 1");
  }
};

inline constexpr std::uint64_t kDefaultSeed = 7;

inline MixtureConfig four_cluster_config(std::size_t samplesPerComponent = 20,
                                         std::uint64_t seed = kDefaultSeed) {
  const double h = 5.0 * std::sqrt(3.0) / 2.0;
  MixtureConfig cfg;
  const std::pair<double, double> means[] = {{0.0, 5.0}, {-h, -2.5}, {h, -2.5}, {8.0, 2.0}};
  for (auto [x, y] : means) {
    Eigen::Vector2d m(x, y);
    cfg.means.emplace_back(m);
  }
  cfg.covarianceDiagonal = Eigen::Vector2d(0.8, 0.8);
  cfg.samplesPerComponent = samplesPerComponent;
  cfg.seed = seed;
  return cfg;
}

inline MixtureConfig ten_cluster_config(std::size_t samplesPerComponent = 10,
                                        std::uint64_t seed = kDefaultSeed) {
  MixtureConfig cfg;
  const std::pair<double, double> means[] = {{-2.5, -12.5}, {5.0, -10.0}, {0.0, -5.0}, {-4.5, -5.0},
                                             {-5.0, 0.0},   {-6.0, 5.0},   {-1.5, 2.5}, {3.5, -1.0},
                                             {7.5, -2.5},   {10.0, 2.5}};
  for (auto [x, y] : means) {
    Eigen::Vector2d m(x, y);
    cfg.means.emplace_back(m);
  }
  cfg.covarianceDiagonal = Eigen::Vector2d(0.2, 0.2);
  cfg.samplesPerComponent = samplesPerComponent;
  cfg.seed = seed;
  return cfg;
}

/// Points are emitted component by component; coordinates draw normals in axis order.
inline PointCloud sample_gaussian_mixture(const MixtureConfig& cfg) {
  cfg.validate();
  NormalStream normals(cfg.seed);
  const Eigen::VectorXd scale = cfg.covarianceDiagonal.cwiseSqrt();
  std::vector<Eigen::VectorXd> points;
  std::vector<int> labels;
  points.reserve(cfg.means.size() * cfg.samplesPerComponent);
  for (std::size_t k = 0; k < cfg.means.size(); ++k) {
    for (std::size_t s = 0; s < cfg.samplesPerComponent; ++s) {
      Eigen::VectorXd p = cfg.means[k];
      for (Eigen::Index d = 0; d < p.size(); ++d) p[d] += scale[d] * normals.next();
      points.push_back(std::move(p));
      labels.push_back(static_cast<int>(k));
    }
  }
  return PointCloud(std::move(points), std::move(labels));
}

}  // namespace omtclust
