#include "fixtures.hpp"
#include "synthcal/data.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace synthcal;

namespace {

Table table_from(std::initializer_list<std::initializer_list<double>> rows, std::vector<int> labels) {
  Table t;
  t.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) t.features(r, c++) = v;
    ++r;
  }
  t.labels = std::move(labels);
  return t;
}

}  // namespace

TEST(LoadCsv, OriginalBreastCancerShape) {
  const Dataset ds = load_csv(fixtures::data_path("breast_cancer_original.csv"), "class", "?");
  EXPECT_EQ(ds.table.rows(), 699u);
  EXPECT_EQ(ds.schema.n_features(), 10u);
  EXPECT_EQ(ds.schema.n_classes(), 2u);
  EXPECT_EQ(ds.table.features.array().isNaN().count(), 16);
}

TEST(LoadCsv, DiagnosticShape) {
  const Dataset ds = load_csv(fixtures::data_path("breast_cancer_diagnostic.csv"), "diagnosis");
  EXPECT_EQ(ds.table.rows(), 569u);
  EXPECT_EQ(ds.schema.n_features(), 30u);
  EXPECT_EQ(ds.schema.class_labels, (std::vector<std::string>{"M", "B"}));
}

TEST(LoadCsv, SingleRow) {
  const Dataset ds = parse_csv("a,b,y\n1,2,M\n", "y", "");
  ASSERT_EQ(ds.table.rows(), 1u);
  EXPECT_EQ(ds.table.features(0, 0), 1.0);
  EXPECT_EQ(ds.table.features(0, 1), 2.0);
  EXPECT_EQ(ds.table.labels, std::vector<int>{0});
}

TEST(LoadCsv, MissingTokenMarksCell) {
  const Dataset ds = parse_csv("a,b,y\n1,?,M\n3,4,B\n", "y", "?");
  EXPECT_TRUE(is_missing(ds.table.features(0, 1)));
  EXPECT_EQ(ds.table.features(1, 1), 4.0);
}

TEST(LoadCsv, TargetInMiddleKeepsLayout) {
  const Dataset ds = parse_csv("a,y,b\n1,M,2\n", "y", "");
  EXPECT_EQ(ds.schema.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(to_csv(ds.schema, ds.table.features, ds.table.labels), "a,y,b\n1,M,2\n");
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(parse_csv("a,b\n1,2\n", "y", ""), SchemaError);
  EXPECT_THROW(parse_csv("a,y\nx,M\n", "y", ""), DataError);
  EXPECT_THROW(parse_csv("", "y", ""), DataError);
  EXPECT_THROW(parse_csv("a,y\n1\n", "y", ""), DataError);
  EXPECT_THROW(load_csv("/nonexistent/file.csv", "y"), ConfigError);
}

TEST(Impute, MeanOfObserved) {
  Table t = table_from({{1}, {kMissing}, {3}}, {0, 0, 0});
  const Table out = impute_missing(t, ImputeStrategy::mean);
  EXPECT_EQ(out.features(1, 0), 2.0);
  EXPECT_EQ(out.features(0, 0), 1.0);
  EXPECT_EQ(out.features(2, 0), 3.0);
}

TEST(Impute, MedianAndZero) {
  Table t = table_from({{1}, {kMissing}, {3}, {10}}, {0, 0, 0, 0});
  EXPECT_EQ(impute_missing(t, ImputeStrategy::median).features(1, 0), 3.0);
  EXPECT_EQ(impute_missing(t, ImputeStrategy::zero).features(1, 0), 0.0);
}

TEST(Impute, NoMissingIsIdentity) {
  Table t = table_from({{1, 2}, {3, 4}}, {0, 1});
  EXPECT_EQ(impute_missing(t, ImputeStrategy::mean).features, t.features);
}

TEST(Impute, AllMissingColumnFallsBackToZero) {
  Table t = table_from({{kMissing, 1}, {kMissing, 2}}, {0, 1});
  for (auto s : {ImputeStrategy::mean, ImputeStrategy::median, ImputeStrategy::zero}) {
    const Imputer imp = fit_imputer(t, s);
    EXPECT_EQ(imp.all_missing_features, std::vector<std::size_t>{0});
    const Table out = imp.apply(t);
    EXPECT_EQ(out.features(0, 0), 0.0);
    EXPECT_EQ(out.features(1, 0), 0.0);
  }
}

TEST(Impute, Idempotent) {
  const Dataset ds = load_csv(fixtures::data_path("breast_cancer_original.csv"), "class", "?");
  const Table once = impute_missing(ds.table, ImputeStrategy::mean);
  EXPECT_FALSE(once.has_missing());
  EXPECT_EQ(impute_missing(once, ImputeStrategy::mean).features, once.features);
}

TEST(EncodeLabels, FirstAppearanceOrder) {
  const auto enc = encode_labels({"M", "B", "M"});
  EXPECT_EQ(enc.indices, (std::vector<int>{0, 1, 0}));
  Matrix expected(3, 2);
  expected << 1, 0, 0, 1, 1, 0;
  EXPECT_EQ(enc.one_hot, expected);
  EXPECT_EQ(enc.decode(enc.indices), (std::vector<std::string>{"M", "B", "M"}));
}

TEST(EncodeLabels, SingleClass) {
  const auto enc = encode_labels({"B", "B"});
  EXPECT_EQ(enc.one_hot.cols(), 1);
  EXPECT_TRUE((enc.one_hot.array() == 1.0).all());
}

TEST(StratifiedSplit, ExactProportions) {
  Table t;
  t.features = Matrix::Zero(10, 1);
  for (int i = 0; i < 10; ++i) t.features(i, 0) = i;
  t.labels = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
  const SplitPair s = stratified_split(t, 0.5, 42);
  EXPECT_EQ(std::count(s.test.labels.begin(), s.test.labels.end(), 0), 3);
  EXPECT_EQ(std::count(s.test.labels.begin(), s.test.labels.end(), 1), 2);
}

TEST(StratifiedSplit, DeterministicAndDisjoint) {
  const Dataset ds = load_csv(fixtures::data_path("breast_cancer_original.csv"), "class", "?");
  const SplitPair a = stratified_split(ds.table, 0.2, 7);
  const SplitPair b = stratified_split(ds.table, 0.2, 7);
  EXPECT_EQ(a.test_rows, b.test_rows);
  EXPECT_EQ(a.train_rows, b.train_rows);
  std::vector<std::size_t> all = a.train_rows;
  all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
  EXPECT_EQ(all.size(), 699u);
  EXPECT_EQ(a.test.rows(), 140u);
}

TEST(StratifiedSplit, StratificationProperty) {
  // Property: per-class test counts within 1 of the ideal, for many fractions and seeds.
  Rng gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 1 + static_cast<int>(gen.index(4));
    Table t;
    for (int c = 0; c < classes; ++c) {
      const int count = 2 + static_cast<int>(gen.index(40));
      for (int k = 0; k < count; ++k) t.labels.push_back(c);
    }
    t.features = Matrix::Zero(static_cast<Eigen::Index>(t.labels.size()), 1);
    const double frac = 0.05 + 0.9 * gen.uniform();
    const SplitPair s = stratified_split(t, frac, trial);
    for (int c = 0; c < classes; ++c) {
      const auto total = std::count(t.labels.begin(), t.labels.end(), c);
      const auto test = std::count(s.test.labels.begin(), s.test.labels.end(), c);
      EXPECT_LE(std::abs(static_cast<double>(test) - frac * static_cast<double>(total)), 1.0);
    }
  }
}

TEST(StratifiedSplit, RejectsTinyClass) {
  Table t;
  t.features = Matrix::Zero(3, 1);
  t.labels = {0, 0, 1};
  EXPECT_THROW(stratified_split(t, 0.5, 1), DataError);
}

TEST(Normalizer, MinMax) {
  Table t = table_from({{2, 5}, {4, 5}, {6, 5}}, {0, 0, 0});
  const Normalizer n = fit_normalizer(t);
  const Matrix x = n.apply(t.features);
  EXPECT_DOUBLE_EQ(x(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(x(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(x(2, 0), 1.0);
  EXPECT_EQ(x.col(1), Vector::Zero(3));
  EXPECT_EQ(n.invert(x).col(1), Vector::Constant(3, 5.0));
}

TEST(Normalizer, NoClippingOutsideTrainRange) {
  Table t = table_from({{0}, {10}}, {0, 0});
  const Normalizer n = fit_normalizer(t);
  Matrix test(1, 1);
  test << 15;
  EXPECT_DOUBLE_EQ(n.apply(test)(0, 0), 1.5);
}

TEST(Normalizer, RoundTripProperty) {
  Rng gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(20, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = (gen.uniform() - 0.5) * 200.0;
    Table t{x, std::vector<int>(20, 0)};
    const Normalizer n = fit_normalizer(t);
    const Matrix back = n.invert(n.apply(x));
    EXPECT_LE((back - x).cwiseAbs().maxCoeff(), 1e-12);
  }
}
