#pragma once

// Downstream classifiers for train-on-synthetic / test-on-real utility.

#include "synthcal/common.hpp"
#include "synthcal/data.hpp"
#include "synthcal/nn.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace synthcal {

enum class ClassifierKind { logistic, knn };

inline ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "logistic") return ClassifierKind::logistic;
  if (name == "knn") return ClassifierKind::knn;
  throw ConfigError("unknown classifier '" + name + "'");
}

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::logistic;
  int epochs = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int k = 5;
};

/// Multinomial logistic regression: a single linear layer with softmax
/// cross-entropy, trained by full-batch gradient descent with L2 on weights.
class LogisticRegression {
 public:
  LogisticRegression(const ClassifierConfig& cfg, int n_classes, std::uint64_t seed) : cfg_(cfg), n_classes_(n_classes), seed_(seed) {}

  void fit(const Matrix& x, const std::vector<int>& labels) {
    Rng rng(seed_);
    net_ = nn::Mlp::create({x.cols(), n_classes_}, {nn::Activation::identity}, rng);
    const Matrix y = one_hot(labels, static_cast<std::size_t>(n_classes_));
    nn::Optimizer gd({nn::Method::sgd, cfg_.learning_rate});
    loss_trace_.clear();
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      nn::Cache cache;
      const Matrix logits = nn::forward(net_, x, &cache);
      Matrix probs(logits.rows(), logits.cols());
      double loss = 0.0;
      for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const Vector lp = nn::log_softmax(logits.row(i).transpose());
        probs.row(i) = lp.array().exp().transpose();
        loss -= lp.dot(y.row(i).transpose());
      }
      loss = loss * inv_n + 0.5 * cfg_.l2 * net_.layers[0].weights.squaredNorm();
      loss_trace_.push_back(loss);
      nn::Gradients g = nn::backward(net_, cache, (probs - y) * inv_n);
      g.weights[0] += cfg_.l2 * net_.layers[0].weights;
      gd.step(net_, g);
    }
  }

  std::vector<int> predict(const Matrix& x) const {
    const Matrix logits = nn::forward(net_, x);
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Eigen::Index best;
      logits.row(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
  }

  const std::vector<double>& loss_trace() const { return loss_trace_; }

 private:
  ClassifierConfig cfg_;
  int n_classes_;
  std::uint64_t seed_;
  nn::Mlp net_;
  std::vector<double> loss_trace_;
};

/// k-nearest-neighbour majority vote; ties go to the class of the nearest voter.
inline std::vector<int> knn_predict(const Matrix& train, const std::vector<int>& labels, const Matrix& query, int k,
                                    int n_classes) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(query.rows()));
  const auto kk = static_cast<std::size_t>(std::min<Eigen::Index>(k, train.rows()));
  std::vector<std::size_t> idx(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index q = 0; q < query.rows(); ++q) {
    const Vector dist = (train.rowwise() - query.row(q)).rowwise().squaredNorm();
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto da = dist(static_cast<Eigen::Index>(a)), db = dist(static_cast<Eigen::Index>(b));
      return da < db || (da == db && a < b);
    });
    std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t v = 0; v < kk; ++v) ++votes[static_cast<std::size_t>(labels[idx[v]])];
    const int top = *std::max_element(votes.begin(), votes.end());
    int pick = labels[idx[0]];
    if (votes[static_cast<std::size_t>(pick)] != top)
      pick = static_cast<int>(std::find(votes.begin(), votes.end(), top) - votes.begin());
    out.push_back(pick);
  }
  return out;
}

struct UtilityResult {
  double accuracy = 0.0;  // percent
  double f1 = 0.0;        // percent, support-weighted
};

inline double accuracy_percent(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.empty()) throw DataError("accuracy: empty test set");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
  return 100.0 * static_cast<double>(hit) / static_cast<double>(truth.size());
}

/// Per-class F1 weighted by true-class support, in percent.
inline double weighted_f1_percent(const std::vector<int>& truth, const std::vector<int>& pred, int n_classes) {
  if (truth.empty()) throw DataError("f1: empty test set");
  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      else if (pred[i] == c) ++fp;
      else if (truth[i] == c) ++fn;
    }
    const std::size_t support = tp + fn;
    if (support == 0) continue;
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = static_cast<double>(tp) / static_cast<double>(support);
    const double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    total += f1 * static_cast<double>(support);
  }
  return 100.0 * total / static_cast<double>(truth.size());
}

/// Train on synthetic rows, score on real test rows.
inline UtilityResult utility_eval(const Table& synth_train, const Table& real_test, int n_classes,
                                  const ClassifierConfig& cfg, std::uint64_t seed) {
  if (real_test.rows() == 0) throw DataError("utility_eval: empty test set");
  if (synth_train.rows() == 0) throw DataError("utility_eval: empty synthetic training set");
  if (synth_train.cols() != real_test.cols()) throw SchemaError("utility_eval: feature count mismatch");
  std::vector<int> pred;
  const bool single_class =
      std::all_of(synth_train.labels.begin(), synth_train.labels.end(), [&](int l) { return l == synth_train.labels.front(); });
  if (single_class) {
    pred.assign(real_test.rows(), synth_train.labels.front());
  } else if (cfg.kind == ClassifierKind::knn) {
    pred = knn_predict(synth_train.features, synth_train.labels, real_test.features, cfg.k, n_classes);
  } else {
    LogisticRegression clf(cfg, n_classes, seed);
    clf.fit(synth_train.features, synth_train.labels);
    pred = clf.predict(real_test.features);
  }
  return {accuracy_percent(real_test.labels, pred), weighted_f1_percent(real_test.labels, pred, n_classes)};
}

}  // namespace synthcal
