#pragma once

// Learned mixture weights over the generator bundle.
//
// A one-step (bandit) MDP: the state summarizes each generator's output and
// the current hybrid's divergence from the real data; the action is a weight
// vector on the simplex; the reward is minus the feature-mean Wasserstein
// distance of the blended hybrid. The policy is an MLP producing logits,
// perturbed by Gaussian noise in logit space and squashed through softmax.
// Updates follow REINFORCE with an exponential-moving-average baseline.

#include "synthcal/common.hpp"
#include "synthcal/distance.hpp"
#include "synthcal/generators.hpp"
#include "synthcal/nn.hpp"

#include <numbers>
#include <vector>

namespace synthcal {

struct PolicyConfig {
  int episodes = 300;
  int hidden = 32;
  double exploration_std = 0.3;
  double learning_rate = 1e-2;
  double baseline_decay = 0.9;
};

struct PolicyModel {
  nn::Mlp net;  // state -> M logits
  double exploration_std = 0.3;
  double learning_rate = 1e-2;
  double baseline = 0.0;
  double baseline_decay = 0.9;
};

struct Action {
  Vector weights;     // softmax(perturbed)
  Vector logits;      // policy mean
  Vector perturbed;   // logits + noise
  double log_prob = 0.0;
};

struct Episode {
  Vector state;
  Action action;
  double reward = 0.0;
};

struct TrainedWeights {
  Vector weights;
  std::vector<double> reward_trace;
  PolicyModel policy;
};

inline std::size_t state_size(std::size_t generators) { return 2 * generators + 2; }

/// [mu_1, sigma_1, ..., mu_M, sigma_M, D_WD, D_KS]. mu_m / sigma_m are the
/// means across features of generator m's column means / population stds.
inline Vector build_state(const GeneratorBundle& bundle, const Matrix& hybrid, const Matrix& real) {
  const std::size_t m_count = bundle.size();
  Vector s(static_cast<Eigen::Index>(state_size(m_count)));
  for (std::size_t m = 0; m < m_count; ++m) {
    const Matrix& g = bundle.outputs[m];
    double mu = 0.0, sd = 0.0;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const Vector col = g.col(j);
      mu += mean_of(col);
      sd += std_of(col);
    }
    const double d = static_cast<double>(std::max<Eigen::Index>(1, g.cols()));
    s(static_cast<Eigen::Index>(2 * m)) = mu / d;
    s(static_cast<Eigen::Index>(2 * m + 1)) = sd / d;
  }
  s(static_cast<Eigen::Index>(2 * m_count)) = mean_wasserstein(hybrid, real);
  s(static_cast<Eigen::Index>(2 * m_count + 1)) = mean_ks(hybrid, real);
  return s;
}

inline PolicyModel make_policy(std::size_t generators, const PolicyConfig& cfg, Rng& rng) {
  if (!(cfg.exploration_std > 0)) throw ConfigError("policy: exploration_std must be positive");
  if (!(cfg.baseline_decay > 0 && cfg.baseline_decay < 1)) throw ConfigError("policy: baseline_decay must lie in (0, 1)");
  if (cfg.hidden < 1) throw ConfigError("policy: hidden width must be positive");
  PolicyModel p;
  const auto m = static_cast<Eigen::Index>(generators);
  p.net = nn::Mlp::create({static_cast<Eigen::Index>(state_size(generators)), cfg.hidden, m},
                          {nn::Activation::tanh, nn::Activation::identity}, rng);
  p.exploration_std = cfg.exploration_std;
  p.learning_rate = cfg.learning_rate;
  p.baseline_decay = cfg.baseline_decay;
  return p;
}

/// Log-density of perturbed logits under N(logits, std^2 I).
inline double action_log_prob(const Vector& logits, const Vector& perturbed, double std_dev) {
  const double k = static_cast<double>(logits.size());
  return -(perturbed - logits).squaredNorm() / (2.0 * std_dev * std_dev) -
         k * std::log(std_dev * std::sqrt(2.0 * std::numbers::pi));
}

inline Action sample_action(const PolicyModel& policy, const Vector& state, Rng& rng) {
  Action a;
  a.logits = nn::forward(policy.net, state);
  a.perturbed = a.logits;
  for (Eigen::Index k = 0; k < a.perturbed.size(); ++k) a.perturbed(k) += policy.exploration_std * rng.normal();
  a.weights = nn::softmax(a.perturbed);
  a.log_prob = action_log_prob(a.logits, a.perturbed, policy.exploration_std);
  return a;
}

/// Exploration-free weights softmax(net(state)).
inline Vector mean_weights(const PolicyModel& policy, const Vector& state) {
  return nn::softmax(nn::forward(policy.net, state));
}

/// Gradient of log pi(perturbed | state) with respect to the policy parameters.
inline nn::Gradients log_prob_gradient(const PolicyModel& policy, const Vector& state, const Vector& perturbed) {
  nn::Cache cache;
  const Matrix in = state.transpose();
  const Matrix logits = nn::forward(policy.net, in, &cache);
  const double var = policy.exploration_std * policy.exploration_std;
  const Matrix dlogits = (perturbed.transpose() - logits) / var;
  return nn::backward(policy.net, cache, dlogits);
}

/// Row-wise convex combination of the bundle's matrices.
inline Matrix combine_hybrid(const GeneratorBundle& bundle, const Vector& weights) {
  if (static_cast<std::size_t>(weights.size()) != bundle.size() || bundle.size() == 0)
    throw std::invalid_argument("combine_hybrid: weight count does not match generator count");
  Matrix out = weights(0) * bundle.outputs[0];
  for (std::size_t m = 1; m < bundle.size(); ++m) {
    if (bundle.outputs[m].rows() != out.rows() || bundle.outputs[m].cols() != out.cols())
      throw std::invalid_argument("combine_hybrid: generator matrices differ in shape");
    out += weights(static_cast<Eigen::Index>(m)) * bundle.outputs[m];
  }
  return out;
}

inline double compute_reward(const Matrix& hybrid, const Matrix& real) { return -mean_wasserstein(hybrid, real); }

/// theta <- theta + lr (r - b) grad log pi; then b <- decay b + (1 - decay) r.
inline void reinforce_update(PolicyModel& policy, const Episode& ep) {
  nn::Gradients g = log_prob_gradient(policy, ep.state, ep.action.perturbed);
  g *= ep.reward - policy.baseline;
  nn::Optimizer sgd({nn::Method::sgd, policy.learning_rate});
  sgd.step(policy.net, g, nn::Direction::ascent);
  policy.baseline = policy.baseline_decay * policy.baseline + (1.0 - policy.baseline_decay) * ep.reward;
}

inline TrainedWeights train_weights(const GeneratorBundle& bundle, const Matrix& real, const PolicyConfig& cfg,
                                    std::uint64_t seed) {
  if (cfg.episodes < 1) throw ConfigError("policy: episodes must be >= 1");
  Rng rng(seed);
  TrainedWeights out;
  out.policy = make_policy(bundle.size(), cfg, rng);
  const auto m = static_cast<Eigen::Index>(bundle.size());
  Matrix hybrid = combine_hybrid(bundle, Vector::Constant(m, 1.0 / static_cast<double>(m)));
  for (int e = 0; e < cfg.episodes; ++e) {
    Episode ep;
    ep.state = build_state(bundle, hybrid, real);
    ep.action = sample_action(out.policy, ep.state, rng);
    hybrid = combine_hybrid(bundle, ep.action.weights);
    ep.reward = compute_reward(hybrid, real);
    reinforce_update(out.policy, ep);
    out.reward_trace.push_back(ep.reward);
  }
  out.weights = mean_weights(out.policy, build_state(bundle, hybrid, real));
  return out;
}

}  // namespace synthcal
