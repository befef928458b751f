#pragma once

// Class-conditional diagonal Gaussian mixtures fitted by EM.

#include "synthcal/common.hpp"
#include "synthcal/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace synthcal {

struct ClassMixture {
  Vector weights;     // K, sums to 1
  Matrix means;       // K x d
  Matrix variances;   // K x d, every entry >= floor
  std::vector<double> log_likelihood_trace;  // mean per-row log-likelihood before each M-step
};

struct GmmModel {
  std::vector<ClassMixture> classes;
  double covariance_floor = 1e-6;

  std::size_t components() const { return classes.empty() ? 0 : static_cast<std::size_t>(classes.front().weights.size()); }
};

struct GmmOptions {
  int components = 3;
  int max_iter = 200;
  double tol = 1e-6;
  double covariance_floor = 1e-6;
};

namespace detail {

// Row log-densities under each component plus the per-row log-sum-exp.
inline void component_log_densities(const Matrix& x, const ClassMixture& mix, Matrix& log_p, Vector& row_ll) {
  const Eigen::Index n = x.rows(), k_count = mix.weights.size();
  log_p.resize(n, k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const auto var = mix.variances.row(k).array();
    const double log_norm = -0.5 * (var * (2.0 * std::numbers::pi)).log().sum();
    const double log_w = mix.weights(k) > 0 ? std::log(mix.weights(k)) : -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double quad = ((x.row(i).array() - mix.means.row(k).array()).square() / var).sum();
      log_p(i, k) = log_w + log_norm - 0.5 * quad;
    }
  }
  row_ll.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = log_p.row(i).maxCoeff();
    row_ll(i) = top + std::log((log_p.row(i).array() - top).exp().sum());
  }
}

// k-means++ seeding: first centre uniform, then proportional to squared
// distance from the nearest chosen centre.
inline Matrix seed_means(const Matrix& x, int k_count, Rng& rng) {
  const Eigen::Index n = x.rows();
  Matrix centres(k_count, x.cols());
  centres.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  Vector best = (x.rowwise() - centres.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < k_count; ++k) {
    const double total = best.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= best(i);
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    }
    centres.row(k) = x.row(pick);
    best = best.cwiseMin((x.rowwise() - centres.row(k)).rowwise().squaredNorm());
  }
  return centres;
}

inline ClassMixture fit_class_mixture(const Matrix& x, const GmmOptions& opt, Rng& rng) {
  const Eigen::Index n = x.rows(), d = x.cols();
  const int k_count = opt.components;
  ClassMixture mix;
  mix.weights = Vector::Constant(k_count, 1.0 / k_count);
  mix.means = seed_means(x, k_count, rng);
  const auto mean = x.colwise().mean();
  const Vector spread = ((x.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n)).transpose();
  mix.variances = spread.cwiseMax(opt.covariance_floor).transpose().replicate(k_count, 1);

  Matrix log_p;
  Vector row_ll;
  for (int it = 0; it < opt.max_iter; ++it) {
    component_log_densities(x, mix, log_p, row_ll);
    const double ll = row_ll.mean();
    if (!std::isfinite(ll)) throw DivergenceError("GMM: non-finite log-likelihood");
    const bool converged = !mix.log_likelihood_trace.empty() && ll - mix.log_likelihood_trace.back() < opt.tol;
    mix.log_likelihood_trace.push_back(ll);
    if (converged) break;

    const Matrix resp = (log_p.colwise() - row_ll).array().exp().matrix();
    for (int k = 0; k < k_count; ++k) {
      const double nk = resp.col(k).sum();
      mix.weights(k) = nk / static_cast<double>(n);
      // An empty component keeps its parameters; with zero weight it cannot
      // lower the likelihood.
      if (nk < 1e-300) continue;
      const Vector mu = (resp.col(k).transpose() * x).transpose() / nk;
      Vector var(d);
      for (Eigen::Index j = 0; j < d; ++j)
        var(j) = (resp.col(k).array() * (x.col(j).array() - mu(j)).square()).sum() / nk;
      mix.means.row(k) = mu.transpose();
      mix.variances.row(k) = var.cwiseMax(opt.covariance_floor).transpose();
    }
    mix.weights /= mix.weights.sum();
  }
  return mix;
}

}  // namespace detail

/// One mixture per class. Throws DataError when a class has fewer rows than components.
inline GmmModel fit_gmm(const Table& train, const GmmOptions& opt, std::uint64_t seed) {
  if (opt.components < 1) throw ConfigError("gmm: need at least one component");
  int n_classes = 0;
  for (int l : train.labels) n_classes = std::max(n_classes, l + 1);
  GmmModel model;
  model.covariance_floor = opt.covariance_floor;
  Rng rng(seed);
  for (int c = 0; c < n_classes; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < train.labels.size(); ++r)
      if (train.labels[r] == c) rows.push_back(r);
    if (rows.size() < static_cast<std::size_t>(opt.components))
      throw DataError("gmm: class " + std::to_string(c) + " has " + std::to_string(rows.size()) + " rows, fewer than " +
                      std::to_string(opt.components) + " components");
    model.classes.push_back(detail::fit_class_mixture(train.select_rows(rows).features, opt, rng));
  }
  return model;
}

/// Row i is drawn from the mixture of class labels[i].
inline Matrix sample_gmm(const GmmModel& model, const std::vector<int>& labels, std::uint64_t seed) {
  if (model.classes.empty()) throw std::invalid_argument("sample_gmm: model not fitted");
  Rng rng(seed);
  const Eigen::Index d = model.classes.front().means.cols();
  Matrix out(static_cast<Eigen::Index>(labels.size()), d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& mix = model.classes.at(static_cast<std::size_t>(labels[i]));
    double u = rng.uniform();
    Eigen::Index k = mix.weights.size() - 1;
    for (Eigen::Index c = 0; c < mix.weights.size(); ++c) {
      u -= mix.weights(c);
      if (u < 0.0) {
        k = c;
        break;
      }
    }
    for (Eigen::Index j = 0; j < d; ++j)
      out(static_cast<Eigen::Index>(i), j) = mix.means(k, j) + std::sqrt(mix.variances(k, j)) * rng.normal();
  }
  return out;
}

}  // namespace synthcal
