#pragma once

// Fidelity, privacy and utility metrics plus plot-data exports.

#include "synthcal/classifier.hpp"
#include "synthcal/common.hpp"
#include "synthcal/data.hpp"
#include "synthcal/distance.hpp"
#include "synthcal/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace synthcal {

/// Leave-one-out 1-NN accuracy (percent) at telling real rows from synthetic
/// rows in the pooled set. Real rows come first in the pool; distance ties go
/// to the lowest pooled index.
inline double nnaa(const Matrix& real, const Matrix& synth) {
  if (real.cols() != synth.cols()) throw SchemaError("nnaa: feature count mismatch");
  if (real.rows() < 2 || synth.rows() < 2) throw DataError("nnaa: need at least two rows on each side");
  Matrix pool(real.rows() + synth.rows(), real.cols());
  pool << real, synth;
  const Eigen::Index n = pool.rows(), n_real = real.rows();
  std::vector<char> correct(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    Eigen::Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = (pool.row(j) - pool.row(i)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    correct[ii] = (best < n_real) == (i < n_real);
  });
  const auto hits = std::count(correct.begin(), correct.end(), 1);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(n);
}

/// Pearson correlations. Zero-variance features get 0 off the diagonal and 1 on it.
inline Matrix correlation_matrix(const Matrix& x) {
  if (x.rows() < 2) throw DataError("correlation_matrix: need at least two rows");
  const Matrix centred = x.rowwise() - x.colwise().mean();
  const Vector norms = centred.colwise().norm().transpose();
  Matrix corr = Matrix::Identity(x.cols(), x.cols());
  for (Eigen::Index a = 0; a < x.cols(); ++a)
    for (Eigen::Index b = a + 1; b < x.cols(); ++b) {
      double r = 0.0;
      if (norms(a) > 0.0 && norms(b) > 0.0)
        r = std::clamp(centred.col(a).dot(centred.col(b)) / (norms(a) * norms(b)), -1.0, 1.0);
      corr(a, b) = corr(b, a) = r;
    }
  return corr;
}

/// 100 * mean_j (1 - KS_j).
inline double column_shapes_score(const Matrix& real, const Matrix& synth) {
  return 100.0 * (1.0 - per_feature_ks(synth, real).array()).mean();
}

inline double pair_trends_from(const Matrix& corr_real, const Matrix& corr_synth) {
  const Eigen::Index d = corr_real.cols();
  if (d < 2) throw SchemaError("pair_trends_score: need at least two features");
  double total = 0.0;
  std::size_t pairs = 0;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b, ++pairs) total += 1.0 - std::abs(corr_real(a, b) - corr_synth(a, b)) / 2.0;
  return 100.0 * total / static_cast<double>(pairs);
}

/// 100 * mean over feature pairs of (1 - |rho_real - rho_synth| / 2).
inline double pair_trends_score(const Matrix& real, const Matrix& synth) {
  if (real.cols() != synth.cols()) throw SchemaError("pair_trends_score: feature count mismatch");
  return pair_trends_from(correlation_matrix(real), correlation_matrix(synth));
}

inline double overall_score(double shapes, double pairs) { return (shapes + pairs) / 2.0; }

// ---------------------------------------------------------------------------
// PCA

struct PcaProjection {
  Vector mean;
  Matrix components;            // n_components x d, rows orthonormal
  Vector eigenvalues;           // all d, descending
  Vector explained_ratio;       // n_components
  Matrix real;                  // n_real x n_components
  Matrix synth;                 // n_synth x n_components
};

/// Components are fitted on the real data only; each component's sign is
/// chosen so its largest-magnitude loading is positive.
inline PcaProjection pca_project(const Matrix& real, const Matrix& synth, int n_components = 2) {
  const Eigen::Index d = real.cols();
  if (n_components < 1 || n_components > d) throw ConfigError("pca_project: n_components must lie in [1, d]");
  if (synth.cols() != d) throw SchemaError("pca_project: feature count mismatch");
  if (real.rows() < 2) throw DataError("pca_project: need at least two real rows");
  PcaProjection out;
  out.mean = real.colwise().mean().transpose();
  const Matrix centred = real.rowwise() - out.mean.transpose();
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(real.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  out.eigenvalues.resize(d);
  Matrix basis(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = d - 1 - k;
    out.eigenvalues(k) = std::max(0.0, eig.eigenvalues()(src));
    Vector v = eig.eigenvectors().col(src);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.row(k) = v.transpose();
  }
  out.components = basis.topRows(n_components);
  const double total = out.eigenvalues.sum();
  out.explained_ratio = total > 0 ? Vector(out.eigenvalues.head(n_components) / total) : Vector::Zero(n_components);
  out.real = centred * out.components.transpose();
  out.synth = (synth.rowwise() - out.mean.transpose()) * out.components.transpose();
  return out;
}

// ---------------------------------------------------------------------------
// Histograms

struct FeatureHistogram {
  std::vector<double> edges;  // bins + 1, spanning the real min..max
  Vector real_density;        // sums to 1
  Vector synth_density;       // sums to 1
  bool clamped = false;       // some synthetic mass fell outside the real range
};

/// Shared bins over the real range; out-of-range synthetic values are clamped
/// into the end bins and flagged.
inline std::vector<FeatureHistogram> export_histograms(const Matrix& real, const Matrix& synth, int bins) {
  if (bins < 2) throw ConfigError("export_histograms: need at least two bins");
  if (real.cols() != synth.cols()) throw SchemaError("export_histograms: feature count mismatch");
  std::vector<FeatureHistogram> out(static_cast<std::size_t>(real.cols()));
  for (Eigen::Index j = 0; j < real.cols(); ++j) {
    auto& h = out[static_cast<std::size_t>(j)];
    const double lo = real.col(j).minCoeff(), hi = real.col(j).maxCoeff();
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + width * b);
    auto fill = [&](const Matrix& m, Vector& density, bool track) {
      density = Vector::Zero(bins);
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double v = m(i, j);
        if (track && (v < lo || v > hi)) h.clamped = true;
        int b = width > 0 ? static_cast<int>(std::floor((v - lo) / width)) : 0;
        density(std::clamp(b, 0, bins - 1)) += 1.0;
      }
      if (m.rows() > 0) density /= static_cast<double>(m.rows());
    };
    fill(real, h.real_density, false);
    fill(synth, h.synth_density, true);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct EvaluationOptions {
  bool nnaa = true;
  bool utility = true;
  ClassifierConfig classifier;
  std::uint64_t seed = 42;
};

struct EvaluationReport {
  Vector per_feature_wd;
  Vector per_feature_ks;
  double mean_wd = 0.0;
  double mean_ks = 0.0;
  double nnaa = 0.0;
  double utility_accuracy = 0.0;
  double utility_f1 = 0.0;
  double column_shapes = 0.0;
  double pair_trends = 0.0;
  double overall = 0.0;
  std::vector<std::string> warnings;
};

/// Everything is computed in normalized feature space; the real training split
/// is the fidelity/privacy reference and the real test split is used only for
/// utility.
inline EvaluationReport evaluate(const Table& real_train, const Table& synth, const Table& real_test, int n_classes,
                                 const EvaluationOptions& opt) {
  if (real_train.cols() != synth.cols()) throw SchemaError("evaluate: feature count mismatch");
  EvaluationReport r;
  r.per_feature_wd = per_feature_wasserstein(synth.features, real_train.features);
  r.per_feature_ks = per_feature_ks(synth.features, real_train.features);
  r.mean_wd = r.per_feature_wd.mean();
  r.mean_ks = r.per_feature_ks.mean();
  r.column_shapes = 100.0 * (1.0 - r.per_feature_ks.array()).mean();
  if (real_train.cols() >= 2) {
    r.pair_trends = pair_trends_score(real_train.features, synth.features);
  } else {
    r.pair_trends = 100.0;
    r.warnings.emplace_back("fewer than two features; pair trends reported as 100");
  }
  r.overall = overall_score(r.column_shapes, r.pair_trends);
  if (opt.nnaa) r.nnaa = nnaa(real_train.features, synth.features);
  if (opt.utility) {
    const auto u = utility_eval(synth, real_test, n_classes, opt.classifier, opt.seed);
    r.utility_accuracy = u.accuracy;
    r.utility_f1 = u.f1;
  }
  return r;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"per_feature_wd", vec(r.per_feature_wd)},
          {"per_feature_ks", vec(r.per_feature_ks)},
          {"mean_wd", r.mean_wd},
          {"mean_ks", r.mean_ks},
          {"nnaa", r.nnaa},
          {"utility_accuracy", r.utility_accuracy},
          {"utility_f1", r.utility_f1},
          {"column_shapes", r.column_shapes},
          {"pair_trends", r.pair_trends},
          {"overall", r.overall},
          {"warnings", r.warnings}};
}

}  // namespace synthcal
