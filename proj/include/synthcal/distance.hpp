#pragma once

// One-dimensional distribution distances between empirical samples.

#include "synthcal/common.hpp"
#include "synthcal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace synthcal {

namespace detail {

inline std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Walks the pooled support left to right. visit(x_prev, x, Fa, Fb) sees the
// CDF values on [x_prev, x) before the jump at x; finish(Fa, Fb) sees them after
// each jump.
template <class Gap, class Jump>
void sweep_cdfs(const std::vector<double>& a, const std::vector<double>& b, Gap&& gap, Jump&& jump) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a.front(), b.front());
  while (i < a.size() || j < b.size()) {
    double x;
    if (i == a.size()) x = b[j];
    else if (j == b.size()) x = a[i];
    else x = std::min(a[i], b[j]);
    gap(prev, x, static_cast<double>(i) / na, static_cast<double>(j) / nb);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    jump(static_cast<double>(i) / na, static_cast<double>(j) / nb);
    prev = x;
  }
}

}  // namespace detail

/// Exact 1-D Wasserstein-1 distance between two empirical samples: the area
/// between their CDFs.
inline double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d: empty sample");
  const auto sa = detail::sorted_copy(a);
  const auto sb = detail::sorted_copy(b);
  double area = 0.0;
  detail::sweep_cdfs(
      sa, sb, [&](double x0, double x1, double fa, double fb) { area += std::abs(fa - fb) * (x1 - x0); },
      [](double, double) {});
  return area;
}

/// Two-sample Kolmogorov-Smirnov statistic with right-continuous CDFs.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  const auto sa = detail::sorted_copy(a);
  const auto sb = detail::sorted_copy(b);
  double sup = 0.0;
  detail::sweep_cdfs(
      sa, sb, [](double, double, double, double) {}, [&](double fa, double fb) { sup = std::max(sup, std::abs(fa - fb)); });
  return sup;
}

inline double wasserstein_1d(const Vector& a, const Vector& b) {
  return wasserstein_1d(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                        std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

inline double ks_statistic(const Vector& a, const Vector& b) {
  return ks_statistic(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                      std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

inline Vector per_feature_wasserstein(const Matrix& x, const Matrix& real) {
  if (x.cols() != real.cols()) throw SchemaError("per_feature_wasserstein: feature count mismatch");
  Vector out(x.cols());
  parallel_for(static_cast<std::size_t>(x.cols()), [&](std::size_t j) {
    const auto c = static_cast<Eigen::Index>(j);
    out(c) = wasserstein_1d(Vector(x.col(c)), Vector(real.col(c)));
  });
  return out;
}

inline Vector per_feature_ks(const Matrix& x, const Matrix& real) {
  if (x.cols() != real.cols()) throw SchemaError("per_feature_ks: feature count mismatch");
  Vector out(x.cols());
  parallel_for(static_cast<std::size_t>(x.cols()), [&](std::size_t j) {
    const auto c = static_cast<Eigen::Index>(j);
    out(c) = ks_statistic(Vector(x.col(c)), Vector(real.col(c)));
  });
  return out;
}

inline double mean_wasserstein(const Matrix& x, const Matrix& real) { return per_feature_wasserstein(x, real).mean(); }
inline double mean_ks(const Matrix& x, const Matrix& real) { return per_feature_ks(x, real).mean(); }

}  // namespace synthcal
