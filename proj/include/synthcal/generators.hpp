#pragma once

// The five row-aligned generators and the bundle that holds their outputs.
// Row i of every output derives from, or is conditioned on the class of,
// training row i.

#include "synthcal/common.hpp"
#include "synthcal/cvae.hpp"
#include "synthcal/data.hpp"
#include "synthcal/gmm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace synthcal {

namespace detail {

inline std::vector<std::vector<std::size_t>> class_members(const std::vector<int>& labels) {
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto c = static_cast<std::size_t>(labels[r]);
    if (members.size() <= c) members.resize(c + 1);
    members[c].push_back(r);
  }
  return members;
}

}  // namespace detail

/// x_i + N(0, sigma^2 I).
inline Matrix noise_inject(const Table& train, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("noise_inject: sigma must be non-negative");
  Matrix out = train.features;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += sigma * rng.normal();
  return out;
}

/// lambda * x_i + (1 - lambda) * x_j with x_j drawn uniformly from the other
/// members of x_i's class. Singleton classes copy the row.
inline Matrix interpolate_same_class(const Table& train, std::uint64_t seed,
                                     std::optional<double> fixed_lambda = std::nullopt) {
  const auto members = detail::class_members(train.labels);
  Rng rng(seed);
  Matrix out = train.features;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const auto& peers = members[static_cast<std::size_t>(train.labels[i])];
    if (peers.size() < 2) continue;
    std::size_t j = peers[rng.index(peers.size() - 1)];
    if (j == i) j = peers.back();  // skip self: i maps onto the one slot left out
    const double lambda = fixed_lambda ? *fixed_lambda : rng.uniform();
    const auto ri = static_cast<Eigen::Index>(i), rj = static_cast<Eigen::Index>(j);
    out.row(ri) = lambda * train.features.row(ri) + (1.0 - lambda) * train.features.row(rj);
  }
  return out;
}

/// Index of the Euclidean nearest neighbour of row i within its class,
/// excluding i; ties go to the lowest row index. Returns i for a singleton class.
inline std::size_t nearest_same_class(const Table& train, std::size_t i) {
  std::size_t best = i;
  double best_d = std::numeric_limits<double>::infinity();
  const auto ri = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < train.rows(); ++j) {
    if (j == i || train.labels[j] != train.labels[i]) continue;
    const double d = (train.features.row(static_cast<Eigen::Index>(j)) - train.features.row(ri)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

/// x_i + gamma * (x_nn - x_i), gamma ~ U(0, 1), applied to every row.
inline Matrix smote_generate(const Table& train, std::uint64_t seed, std::optional<double> fixed_gamma = std::nullopt) {
  Rng rng(seed);
  Matrix out = train.features;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    const std::size_t j = nearest_same_class(train, i);
    if (j == i) continue;
    const double gamma = fixed_gamma ? *fixed_gamma : rng.uniform();
    const auto ri = static_cast<Eigen::Index>(i), rj = static_cast<Eigen::Index>(j);
    out.row(ri) = train.features.row(ri) + gamma * (train.features.row(rj) - train.features.row(ri));
  }
  return out;
}

struct GeneratorConfig {
  double sigma = 0.05;
  GmmOptions gmm;
  CvaeOptions cvae;
};

struct GeneratorBundle {
  std::vector<std::string> names;
  std::vector<Matrix> outputs;
  std::vector<double> cvae_epoch_loss;

  std::size_t size() const { return outputs.size(); }
};

inline const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"noise", "interpolation", "gmm", "cvae", "smote"};
  return names;
}

inline GeneratorBundle generate_bundle(const Table& train, int n_classes, const GeneratorConfig& cfg,
                                       std::uint64_t seed) {
  GeneratorBundle bundle;
  bundle.names = generator_names();
  bundle.outputs.push_back(noise_inject(train, cfg.sigma, seed + seed_offset::noise));
  bundle.outputs.push_back(interpolate_same_class(train, seed + seed_offset::interpolation));
  const GmmModel gmm = fit_gmm(train, cfg.gmm, seed + seed_offset::gmm_fit);
  bundle.outputs.push_back(sample_gmm(gmm, train.labels, seed + seed_offset::gmm_sample));
  const CvaeModel cvae = train_cvae(train, n_classes, cfg.cvae, seed + seed_offset::cvae_train);
  bundle.cvae_epoch_loss = cvae.epoch_loss;
  bundle.outputs.push_back(sample_cvae(cvae, train.labels, seed + seed_offset::cvae_sample));
  bundle.outputs.push_back(smote_generate(train, seed + seed_offset::smote));
  return bundle;
}

}  // namespace synthcal
