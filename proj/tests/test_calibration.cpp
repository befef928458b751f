#include "oracles.hpp"
#include "synthcal/calibration.hpp"

#include <gtest/gtest.h>

using namespace synthcal;

namespace {

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

Matrix random(Eigen::Index n, Eigen::Index d, std::uint64_t seed, double scale = 1.0, double shift = 0.0) {
  Rng rng(seed);
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = shift + scale * rng.normal();
  return m;
}

}  // namespace

TEST(Moment, ClosedFormExample) {
  const Matrix out = calibrate_moment(column({0, 2}), column({8, 12})).calibrated;
  EXPECT_DOUBLE_EQ(out(0, 0), 8.0);
  EXPECT_DOUBLE_EQ(out(1, 0), 12.0);
}

TEST(Moment, AlreadyMatchedIsIdentity) {
  const Matrix real = random(40, 3, 1);
  Matrix h = random(40, 3, 2);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Vector c = h.col(j), r = real.col(j);
    h.col(j) = ((c.array() - mean_of(c)) / std_of(c) * std_of(r) + mean_of(r)).matrix();
  }
  EXPECT_LT((calibrate_moment(h, real).calibrated - h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Moment, ConstantFeatureFlagged) {
  Matrix h(3, 2), r(3, 2);
  h << 1, 0, 1, 1, 1, 2;
  r << 4, 0, 5, 1, 6, 5;
  const auto res = calibrate_moment(h, r);
  EXPECT_EQ(res.degenerate_features, std::vector<std::size_t>{0});
  EXPECT_EQ(res.calibrated.col(0), Vector::Constant(3, 5.0));
}

TEST(Moment, ExactnessProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix real = random(50 + seed, 4, seed, 0.3, 0.5);
    const Matrix h = random(30 + 3 * seed, 4, seed + 100, 2.0, -1.0);
    const Matrix out = calibrate_moment(h, real).calibrated;
    for (Eigen::Index j = 0; j < 4; ++j) {
      const Vector o = out.col(j), r = real.col(j);
      EXPECT_NEAR(mean_of(o), mean_of(r), 1e-9);
      EXPECT_NEAR(std_of(o), std_of(r), 1e-9);
    }
  }
}

TEST(Full, EqualSizeRankMap) {
  const Matrix out = calibrate_full_histogram(column({0, 1, 2}), column({10, 20, 30})).calibrated;
  EXPECT_EQ(out, column({10, 20, 30}));
  const Matrix shuffled = calibrate_full_histogram(column({2, 0, 1}), column({30, 10, 20})).calibrated;
  EXPECT_EQ(shuffled, column({30, 10, 20}));
}

TEST(Full, RealAgainstItselfIsIdentity) {
  const Matrix real = random(60, 3, 4);
  EXPECT_LT((calibrate_full_histogram(real, real).calibrated - real).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Full, FiveVersusSevenMatchesBruteForce) {
  const std::vector<double> synth{0.4, -1.2, 3.3, 0.4, 2.0};
  const std::vector<double> real{5.0, 1.0, 2.5, -3.0, 7.5, 0.0, 4.25};
  const Vector out = quantile_map(Eigen::Map<const Vector>(synth.data(), 5), Eigen::Map<const Vector>(real.data(), 7));
  const auto expected = oracle::quantile_map_brute_force(synth, real);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out(static_cast<Eigen::Index>(i)), expected[i]) << i;
}

TEST(Full, RandomSizesMatchBruteForce) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(1 + rng.index(12)), r(1 + rng.index(12));
    for (double& v : s) v = trial % 3 == 0 ? static_cast<double>(rng.index(3)) : rng.normal();
    for (double& v : r) v = rng.normal();
    const Vector out = quantile_map(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())),
                                    Eigen::Map<const Vector>(r.data(), static_cast<Eigen::Index>(r.size())));
    const auto expected = oracle::quantile_map_brute_force(s, r);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(out(static_cast<Eigen::Index>(i)), expected[i]);
  }
}

TEST(Full, HistogramExactnessWithoutTies) {
  const Matrix real = random(80, 2, 5), h = random(80, 2, 6, 3.0);
  const Matrix out = calibrate_full_histogram(h, real).calibrated;
  for (Eigen::Index j = 0; j < 2; ++j) {
    Vector a = out.col(j), b = real.col(j);
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    EXPECT_EQ(a, b);
  }
}

TEST(Full, KsCollapseBound) {
  for (auto [ns, nr] : std::vector<std::pair<int, int>>{{50, 80}, {120, 45}, {33, 33}, {200, 7}}) {
    const Matrix real = random(nr, 3, static_cast<std::uint64_t>(ns)), h = random(ns, 3, static_cast<std::uint64_t>(nr) + 7, 2.0, 1.0);
    const Vector ks = per_feature_ks(calibrate_full_histogram(h, real).calibrated, real);
    EXPECT_LE(ks.maxCoeff(), 1.0 / std::min(ns, nr) + 1.0 / std::max(ns, nr) + 1e-12) << ns << " vs " << nr;
  }
}

TEST(Full, MonotoneMap) {
  const Matrix real = random(40, 1, 8), h = random(70, 1, 9);
  const Matrix out = calibrate_full_histogram(h, real).calibrated;
  for (Eigen::Index a = 0; a < h.rows(); ++a)
    for (Eigen::Index b = 0; b < h.rows(); ++b)
      if (h(a, 0) < h(b, 0)) {
        EXPECT_LE(out(a, 0), out(b, 0));
      }
}

TEST(Soft, Endpoints) {
  const Matrix real = random(30, 2, 1), h = random(30, 2, 2, 2.0);
  const Matrix full = full_match(h, real);
  EXPECT_EQ(calibrate_soft(h, real, 1.0).calibrated, h);
  EXPECT_EQ(calibrate_soft(h, real, 0.0).calibrated, full);
  EXPECT_LT((calibrate_soft(h, real, 0.5).calibrated - 0.5 * (h + full)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(calibrate_soft(h, real, 1.5), ConfigError);
  EXPECT_THROW(calibrate_soft(h, real, -0.1), ConfigError);
}

TEST(Soft, BetweennessProperty) {
  Rng rng(3);
  const Matrix real = random(25, 3, 10), h = random(40, 3, 11, 2.0, 0.5);
  const Matrix full = full_match(h, real);
  for (int k = 0; k < 20; ++k) {
    const double alpha = rng.uniform();
    const Matrix out = calibrate_soft(h, real, alpha).calibrated;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      EXPECT_GE(out.data()[i], std::min(h.data()[i], full.data()[i]) - 1e-12);
      EXPECT_LE(out.data()[i], std::max(h.data()[i], full.data()[i]) + 1e-12);
    }
  }
}

TEST(Adaptive, AlphaAtThresholdIsHalf) {
  const AdaptiveParams p;
  EXPECT_EQ(adaptive_alpha(p.tau, p), 0.5);
  EXPECT_NEAR(adaptive_alpha(0.0, p), 1.0 / (1.0 + std::exp(-p.beta * p.tau)), 1e-15);
  EXPECT_GT(adaptive_alpha(0.0, p), 0.5);
  EXPECT_LT(adaptive_alpha(1.0, p), 1e-9);
}

TEST(Adaptive, StrictlyDecreasingInDiscrepancy) {
  const AdaptiveParams p;
  double last = 2.0;
  for (double d = 0.0; d <= 0.2; d += 0.005) {
    const double a = adaptive_alpha(d, p);
    EXPECT_LT(a, last);
    last = a;
  }
}

TEST(Adaptive, AsPrintedFlagFlipsSign) {
  AdaptiveParams p;
  p.as_printed = true;
  EXPECT_GT(adaptive_alpha(0.2, p), 0.99);
  EXPECT_NEAR(adaptive_alpha(0.2, p) + adaptive_alpha(0.2, AdaptiveParams{}), 1.0, 1e-12);
}

TEST(Adaptive, DiscrepantFeatureGetsMatched) {
  const Matrix real = random(100, 2, 1, 0.1, 0.5);
  Matrix h = random(100, 2, 2, 0.1, 0.5);
  h.col(1).array() += 0.3;
  const auto res = calibrate_adaptive(h, real, AdaptiveParams{});
  EXPECT_LT(res.per_feature_alpha(1), 1e-4);
  EXPECT_GT(res.per_feature_alpha(0), res.per_feature_alpha(1));
  const Vector before = per_feature_ks(h, real), after = per_feature_ks(res.calibrated, real);
  EXPECT_LE(after(1), 0.5 * before(1));
  AdaptiveParams bad;
  bad.beta = 0.0;
  EXPECT_THROW(calibrate_adaptive(h, real, bad), ConfigError);
}

TEST(Iterative, DescentAndConvergence) {
  const Matrix real = random(90, 3, 12, 0.2, 0.5), h = random(90, 3, 13, 0.3, 0.6);
  const auto res = calibrate_iterative(h, real, 1e-3, 200, 1e-5);
  ASSERT_GE(res.wd_trace.size(), 2u);
  EXPECT_NEAR(res.wd_trace.front(), mean_wasserstein(h, real), 1e-15);
  for (std::size_t t = 1; t < res.wd_trace.size(); ++t) EXPECT_LE(res.wd_trace[t], res.wd_trace[t - 1] + 1e-9);
  EXPECT_LT(res.wd_trace.back(), 1e-3);
  EXPECT_EQ(res.alpha_trace.size(), res.wd_trace.size() - 1);
  for (double a : res.alpha_trace) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(Iterative, AlphaIsHalfWhenDistanceEqualsEps) {
  const Matrix real = column({0, 1, 2, 3});
  const Matrix h = (real.array() + 0.25).matrix();
  const auto res = calibrate_iterative(h, real, 0.25, 1, 1e-12);
  EXPECT_DOUBLE_EQ(res.alpha_trace.front(), 0.5);
  EXPECT_NEAR(res.wd_trace.back(), 0.125, 1e-12);
}

TEST(Iterative, FixedPointStaysConstant) {
  const Matrix real = random(30, 2, 14);
  const Matrix fixed = full_match(random(30, 2, 15), real);
  const auto res = calibrate_iterative(fixed, real, 1e-3, 20, 1e-5);
  EXPECT_EQ(res.wd_trace.size(), 2u);
  EXPECT_EQ(res.wd_trace[0], res.wd_trace[1]);
  EXPECT_EQ(res.calibrated, fixed);
}

TEST(Iterative, PerFeatureVariant) {
  const Matrix real = random(60, 3, 16, 0.2, 0.5);
  Matrix h = random(60, 3, 17, 0.2, 0.5);
  h.col(2).array() += 0.2;
  const auto res = calibrate_iterative(h, real, 1e-3, 200, 1e-5, true);
  for (std::size_t t = 1; t < res.wd_trace.size(); ++t) EXPECT_LE(res.wd_trace[t], res.wd_trace[t - 1] + 1e-9);
  EXPECT_EQ(res.per_feature_alpha.size(), 3);
}

TEST(Iterative, RejectsBadParameters) {
  const Matrix m = column({0, 1});
  EXPECT_THROW(calibrate_iterative(m, m, 0.0, 5, 1e-5), ConfigError);
  EXPECT_THROW(calibrate_iterative(m, m, 1e-3, 0, 1e-5), ConfigError);
}

TEST(Dispatch, EveryMethodKeepsShape) {
  const Matrix real = random(40, 3, 20), h = random(55, 3, 21);
  for (auto m : all_calibration_methods()) {
    const auto res = calibrate(m, h, real, CalibrationParams{});
    EXPECT_EQ(res.method, m);
    EXPECT_EQ(res.calibrated.rows(), h.rows());
    EXPECT_EQ(res.calibrated.cols(), h.cols());
    EXPECT_EQ(parse_calibration_method(to_string(m)), m);
    if (res.per_feature_alpha.size() > 0) {
      EXPECT_GE(res.per_feature_alpha.minCoeff(), 0.0);
      EXPECT_LE(res.per_feature_alpha.maxCoeff(), 1.0);
    }
  }
  EXPECT_EQ(calibrate(CalibrationMethod::raw, h, real, CalibrationParams{}).calibrated, h);
  EXPECT_THROW(parse_calibration_method("bogus"), ConfigError);
  EXPECT_THROW(calibrate(CalibrationMethod::full, h, Matrix(4, 2), CalibrationParams{}), SchemaError);
}
