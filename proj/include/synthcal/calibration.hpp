#pragma once

// Post-hoc per-feature calibration of a synthetic matrix against real
// training data. Every operator works column by column on marginals.

#include "synthcal/common.hpp"
#include "synthcal/distance.hpp"
#include "synthcal/nn.hpp"
#include "synthcal/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace synthcal {

enum class CalibrationMethod { raw, moment, full, soft, adaptive, iterative };

inline const std::vector<CalibrationMethod>& all_calibration_methods() {
  static const std::vector<CalibrationMethod> methods{CalibrationMethod::raw,  CalibrationMethod::moment,
                                                      CalibrationMethod::full, CalibrationMethod::soft,
                                                      CalibrationMethod::adaptive, CalibrationMethod::iterative};
  return methods;
}

inline std::string to_string(CalibrationMethod m) {
  switch (m) {
    case CalibrationMethod::raw: return "raw";
    case CalibrationMethod::moment: return "moment";
    case CalibrationMethod::full: return "full";
    case CalibrationMethod::soft: return "soft";
    case CalibrationMethod::adaptive: return "adaptive";
    case CalibrationMethod::iterative: return "iterative";
  }
  return "raw";
}

inline CalibrationMethod parse_calibration_method(const std::string& name) {
  for (auto m : all_calibration_methods())
    if (to_string(m) == name) return m;
  throw ConfigError("unknown calibration method '" + name + "'");
}

struct AdaptiveParams {
  double beta = 50.0;
  double tau = 0.02;
  // Literal sigmoid(+beta (D - tau)): discrepant features keep the hybrid.
  bool as_printed = false;
};

struct CalibrationParams {
  double alpha = 0.5;
  AdaptiveParams adaptive;
  double eps = 1e-3;
  int max_iter = 200;  // each step removes roughly eps of mean WD while W >> eps
  double tol = 1e-5;
  bool iterative_per_feature = false;
};

struct CalibrationResult {
  Matrix calibrated;
  CalibrationMethod method = CalibrationMethod::raw;
  Vector per_feature_alpha;          // soft / adaptive (and per-feature iterative: last step)
  std::vector<double> alpha_trace;   // iterative, one entry per step
  std::vector<double> wd_trace;      // iterative, W^(0), W^(1), ...
  std::vector<std::size_t> degenerate_features;  // moment: zero synthetic spread
};

/// Rank-based quantile mapping of one column onto a real sample.
///
/// The value with rank r among n_s synthetic values (ties ordered by row)
/// maps to the real empirical quantile at p = (r + 0.5) / n_s, i.e. position
/// p * n_r - 0.5 among the real order statistics, interpolated linearly and
/// clamped to the sample range. Positions are kept as exact rationals so
/// equal-size samples land exactly on order statistics.
inline Vector quantile_map(const Vector& synth, const Vector& real) {
  const auto ns = static_cast<std::int64_t>(synth.size());
  const auto nr = static_cast<std::int64_t>(real.size());
  if (nr == 0) throw std::invalid_argument("quantile_map: empty real sample");
  std::vector<double> sorted_real(real.data(), real.data() + nr);
  std::sort(sorted_real.begin(), sorted_real.end());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ns));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return synth(a) < synth(b); });

  Vector out(ns);
  const std::int64_t den = 2 * ns;
  for (std::int64_t r = 0; r < ns; ++r) {
    const std::int64_t num = (2 * r + 1) * nr - ns;
    double value;
    if (num <= 0) {
      value = sorted_real.front();
    } else {
      const std::int64_t idx = num / den;
      const std::int64_t rem = num % den;
      if (idx >= nr - 1) {
        value = sorted_real.back();
      } else {
        const double lo = sorted_real[static_cast<std::size_t>(idx)];
        const double hi = sorted_real[static_cast<std::size_t>(idx + 1)];
        value = rem == 0 ? lo : lo + (static_cast<double>(rem) / static_cast<double>(den)) * (hi - lo);
      }
    }
    out(order[static_cast<std::size_t>(r)]) = value;
  }
  return out;
}

namespace detail {

inline void check_shapes(const Matrix& hybrid, const Matrix& real) {
  if (hybrid.cols() != real.cols()) throw SchemaError("calibration: feature count mismatch");
  if (real.rows() == 0) throw DataError("calibration: empty real data");
}

inline Matrix blend(const Matrix& hybrid, const Matrix& matched, const Vector& alpha) {
  Matrix out(hybrid.rows(), hybrid.cols());
  for (Eigen::Index j = 0; j < hybrid.cols(); ++j)
    out.col(j) = alpha(j) * hybrid.col(j) + (1.0 - alpha(j)) * matched.col(j);
  return out;
}

}  // namespace detail

inline Matrix full_match(const Matrix& hybrid, const Matrix& real) {
  detail::check_shapes(hybrid, real);
  Matrix out(hybrid.rows(), hybrid.cols());
  parallel_for(static_cast<std::size_t>(hybrid.cols()), [&](std::size_t j) {
    const auto c = static_cast<Eigen::Index>(j);
    out.col(c) = quantile_map(hybrid.col(c), real.col(c));
  });
  return out;
}

/// Affine per-feature map onto the real mean and (population) standard
/// deviation. A feature with zero synthetic spread becomes the real mean and
/// is listed in degenerate_features.
inline CalibrationResult calibrate_moment(const Matrix& hybrid, const Matrix& real) {
  detail::check_shapes(hybrid, real);
  CalibrationResult res;
  res.method = CalibrationMethod::moment;
  res.calibrated.resize(hybrid.rows(), hybrid.cols());
  for (Eigen::Index j = 0; j < hybrid.cols(); ++j) {
    const Vector h = hybrid.col(j);
    const Vector r = real.col(j);
    const double mu_s = mean_of(h), sd_s = std_of(h);
    const double mu_r = mean_of(r), sd_r = std_of(r);
    if (!(sd_s > 0.0)) {
      res.calibrated.col(j).setConstant(mu_r);
      res.degenerate_features.push_back(static_cast<std::size_t>(j));
      continue;
    }
    res.calibrated.col(j) = ((h.array() - mu_s) * (sd_r / sd_s) + mu_r).matrix();
  }
  return res;
}

inline CalibrationResult calibrate_full_histogram(const Matrix& hybrid, const Matrix& real) {
  CalibrationResult res;
  res.method = CalibrationMethod::full;
  res.calibrated = full_match(hybrid, real);
  res.per_feature_alpha = Vector::Zero(hybrid.cols());
  return res;
}

inline CalibrationResult calibrate_soft(const Matrix& hybrid, const Matrix& real, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("soft calibration: alpha must lie in [0, 1]");
  CalibrationResult res;
  res.method = CalibrationMethod::soft;
  res.per_feature_alpha = Vector::Constant(hybrid.cols(), alpha);
  res.calibrated = detail::blend(hybrid, full_match(hybrid, real), res.per_feature_alpha);
  return res;
}

/// Blend weight kept on the hybrid for a feature with discrepancy D.
inline double adaptive_alpha(double discrepancy, const AdaptiveParams& params) {
  const double x = params.beta * (discrepancy - params.tau);
  return params.as_printed ? nn::sigmoid(x) : nn::sigmoid(-x);
}

inline CalibrationResult calibrate_adaptive(const Matrix& hybrid, const Matrix& real, const AdaptiveParams& params) {
  if (!(params.beta > 0.0) || !std::isfinite(params.beta)) throw ConfigError("adaptive calibration: beta must be positive");
  detail::check_shapes(hybrid, real);
  CalibrationResult res;
  res.method = CalibrationMethod::adaptive;
  const Vector discrepancy = per_feature_wasserstein(hybrid, real);
  res.per_feature_alpha = discrepancy.unaryExpr([&](double d) { return adaptive_alpha(d, params); });
  res.calibrated = detail::blend(hybrid, full_match(hybrid, real), res.per_feature_alpha);
  return res;
}

/// Repeated soft matching with alpha^(t) = W^(t) / (W^(t) + eps), where W^(t)
/// is the feature-mean Wasserstein distance of the current iterate. The match
/// target is recomputed from each iterate.
inline CalibrationResult calibrate_iterative(const Matrix& hybrid, const Matrix& real, double eps, int max_iter,
                                             double tol, bool per_feature = false) {
  if (!(eps > 0.0)) throw ConfigError("iterative calibration: eps must be positive");
  if (max_iter < 1) throw ConfigError("iterative calibration: max_iter must be >= 1");
  detail::check_shapes(hybrid, real);
  CalibrationResult res;
  res.method = CalibrationMethod::iterative;
  Matrix x = hybrid;
  Vector wd = per_feature_wasserstein(x, real);
  double w = wd.mean();
  res.wd_trace.push_back(w);
  for (int t = 0; t < max_iter; ++t) {
    Vector alpha;
    if (per_feature) {
      alpha = wd.unaryExpr([&](double v) { return v / (v + eps); });
      res.alpha_trace.push_back(alpha.mean());
    } else {
      const double a = w / (w + eps);
      alpha = Vector::Constant(x.cols(), a);
      res.alpha_trace.push_back(a);
    }
    x = detail::blend(x, full_match(x, real), alpha);
    res.per_feature_alpha = alpha;
    wd = per_feature_wasserstein(x, real);
    const double next = wd.mean();
    res.wd_trace.push_back(next);
    const bool converged = std::abs(next - w) < tol;
    w = next;
    if (converged) break;
  }
  res.calibrated = std::move(x);
  return res;
}

inline CalibrationResult calibrate(CalibrationMethod method, const Matrix& hybrid, const Matrix& real,
                                   const CalibrationParams& params) {
  switch (method) {
    case CalibrationMethod::raw: {
      CalibrationResult res;
      res.method = CalibrationMethod::raw;
      res.calibrated = hybrid;
      res.per_feature_alpha = Vector::Ones(hybrid.cols());
      return res;
    }
    case CalibrationMethod::moment: return calibrate_moment(hybrid, real);
    case CalibrationMethod::full: return calibrate_full_histogram(hybrid, real);
    case CalibrationMethod::soft: return calibrate_soft(hybrid, real, params.alpha);
    case CalibrationMethod::adaptive: return calibrate_adaptive(hybrid, real, params.adaptive);
    case CalibrationMethod::iterative:
      return calibrate_iterative(hybrid, real, params.eps, params.max_iter, params.tol, params.iterative_per_feature);
  }
  throw ConfigError("unhandled calibration method");
}

}  // namespace synthcal
