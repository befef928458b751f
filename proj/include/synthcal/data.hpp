#pragma once

// Tabular dataset handling: CSV ingestion, imputation, label encoding,
// stratified splitting and min-max normalization.

#include "synthcal/common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace synthcal {

struct Schema {
  std::vector<std::string> feature_names;
  std::string target_name;
  // Column position of the target in the source file, so emitted CSVs keep
  // the same header layout.
  std::size_t target_column = 0;
  std::vector<std::string> class_labels;

  std::size_t n_features() const { return feature_names.size(); }
  std::size_t n_classes() const { return class_labels.size(); }
};

/// Feature matrix plus class indices. Missing cells hold NaN.
struct Table {
  Matrix features;
  std::vector<int> labels;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }

  Vector column(std::size_t j) const { return features.col(static_cast<Eigen::Index>(j)); }

  Table select_rows(const std::vector<std::size_t>& rows) const {
    Table out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
      out.labels.push_back(labels[rows[r]]);
    }
    return out;
  }

  bool has_missing() const { return features.hasNaN(); }
};

struct Dataset {
  Schema schema;
  Table table;
};

struct SplitPair {
  Table train;
  Table test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one CSV record. Double-quoted fields may contain commas; "" escapes a quote.
inline std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.emplace_back(trim(cell));
  return cells;
}

inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

struct LabelEncoding {
  std::vector<int> indices;
  Matrix one_hot;
  std::vector<std::string> classes;  // index -> raw label, first-appearance order

  std::vector<std::string> decode(const std::vector<int>& idx) const {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(classes.at(static_cast<std::size_t>(i)));
    return out;
  }
};

inline Matrix one_hot(const std::vector<int>& indices, std::size_t n_classes) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(n_classes));
  for (std::size_t r = 0; r < indices.size(); ++r) out(static_cast<Eigen::Index>(r), indices[r]) = 1.0;
  return out;
}

/// Maps raw labels to class indices in order of first appearance.
inline LabelEncoding encode_labels(const std::vector<std::string>& raw_labels) {
  if (raw_labels.empty()) throw DataError("encode_labels: no labels");
  LabelEncoding enc;
  std::unordered_map<std::string, int> lookup;
  enc.indices.reserve(raw_labels.size());
  for (const auto& raw : raw_labels) {
    auto [it, inserted] = lookup.try_emplace(raw, static_cast<int>(enc.classes.size()));
    if (inserted) enc.classes.push_back(raw);
    enc.indices.push_back(it->second);
  }
  enc.one_hot = one_hot(enc.indices, enc.classes.size());
  return enc;
}

inline Dataset parse_csv(std::string_view text, const std::string& target_name, const std::string& missing_token,
                         const std::string& origin = "<memory>") {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!detail::trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw DataError(origin + ": empty file");

  auto header = detail::split_record(lines.front());
  auto target_it = std::find(header.begin(), header.end(), target_name);
  if (target_it == header.end()) throw SchemaError(origin + ": target column '" + target_name + "' not found");

  Dataset ds;
  ds.schema.target_name = target_name;
  ds.schema.target_column = static_cast<std::size_t>(target_it - header.begin());
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == ds.schema.target_column) continue;
    if (!seen.insert(header[c]).second) throw SchemaError(origin + ": duplicate column '" + header[c] + "'");
    ds.schema.feature_names.push_back(header[c]);
  }
  if (seen.count(target_name)) throw SchemaError(origin + ": target name repeated among features");

  const std::size_t d = ds.schema.n_features();
  const std::size_t n = lines.size() - 1;
  ds.table.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::string> raw_labels;
  raw_labels.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto cells = detail::split_record(lines[r + 1]);
    if (cells.size() != header.size())
      throw DataError(origin + ": line " + std::to_string(r + 2) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(header.size()));
    std::size_t j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == ds.schema.target_column) {
        raw_labels.push_back(cells[c]);
        continue;
      }
      double value;
      if (cells[c] == missing_token) {
        value = kMissing;
      } else if (!detail::parse_double(cells[c], value)) {
        throw DataError(origin + ": line " + std::to_string(r + 2) + ", column '" + header[c] +
                        "': cannot parse '" + cells[c] + "' as a number");
      }
      ds.table.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j++)) = value;
    }
  }
  if (n == 0) throw DataError(origin + ": no data rows");
  auto enc = encode_labels(raw_labels);
  ds.table.labels = std::move(enc.indices);
  ds.schema.class_labels = std::move(enc.classes);
  return ds;
}

inline Dataset load_csv(const std::filesystem::path& path, const std::string& target_name,
                        const std::string& missing_token = "") {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), target_name, missing_token, path.string());
}

/// Re-reads a CSV against a known schema: same header, labels from the known class set.
inline Table load_csv_with_schema(const std::filesystem::path& path, const Schema& schema) {
  Dataset ds = load_csv(path, schema.target_name, "");
  if (ds.schema.feature_names != schema.feature_names || ds.schema.target_column != schema.target_column)
    throw SchemaError(path.string() + ": header does not match dataset schema");
  for (auto& label : ds.table.labels) {
    const auto& raw = ds.schema.class_labels[static_cast<std::size_t>(label)];
    auto it = std::find(schema.class_labels.begin(), schema.class_labels.end(), raw);
    if (it == schema.class_labels.end()) throw SchemaError(path.string() + ": unknown class label '" + raw + "'");
    label = static_cast<int>(it - schema.class_labels.begin());
  }
  if (ds.table.has_missing()) throw SchemaError(path.string() + ": empty cells in synthetic data");
  return ds.table;
}

inline std::string to_csv(const Schema& schema, const Matrix& features, const std::vector<int>& labels) {
  std::string out;
  const std::size_t width = schema.n_features() + 1;
  auto emit_row = [&](auto cell_at) {
    std::size_t j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c) out.push_back(',');
      if (c == schema.target_column) out += cell_at(true, 0);
      else out += cell_at(false, j++);
    }
    out.push_back('\n');
  };
  emit_row([&](bool target, std::size_t j) {
    return detail::quote_if_needed(target ? schema.target_name : schema.feature_names[j]);
  });
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    emit_row([&](bool target, std::size_t j) {
      if (target) return detail::quote_if_needed(schema.class_labels.at(static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])));
      const double v = features(r, static_cast<Eigen::Index>(j));
      return is_missing(v) ? std::string() : format_double(v);
    });
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const Schema& schema, const Matrix& features,
                      const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << to_csv(schema, features, labels);
}

// ---------------------------------------------------------------------------
// Imputation

enum class ImputeStrategy { mean, median, zero };

inline ImputeStrategy parse_impute_strategy(const std::string& name) {
  if (name == "mean") return ImputeStrategy::mean;
  if (name == "median") return ImputeStrategy::median;
  if (name == "zero") return ImputeStrategy::zero;
  throw ConfigError("unknown imputation strategy '" + name + "'");
}

struct Imputer {
  Vector fill;
  std::vector<std::size_t> all_missing_features;

  Table apply(Table table) const {
    for (Eigen::Index r = 0; r < table.features.rows(); ++r)
      for (Eigen::Index j = 0; j < table.features.cols(); ++j)
        if (is_missing(table.features(r, j))) table.features(r, j) = fill(j);
    return table;
  }
};

/// Fill values per feature over the observed cells. A column with no observed
/// value falls back to 0 and is reported in all_missing_features.
inline Imputer fit_imputer(const Table& train, ImputeStrategy strategy) {
  Imputer imp;
  imp.fill = Vector::Zero(train.features.cols());
  for (Eigen::Index j = 0; j < train.features.cols(); ++j) {
    std::vector<double> observed;
    for (Eigen::Index r = 0; r < train.features.rows(); ++r)
      if (!is_missing(train.features(r, j))) observed.push_back(train.features(r, j));
    if (observed.empty()) {
      imp.all_missing_features.push_back(static_cast<std::size_t>(j));
      continue;
    }
    switch (strategy) {
      case ImputeStrategy::zero:
        break;
      case ImputeStrategy::mean:
        imp.fill(j) = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
        break;
      case ImputeStrategy::median: {
        std::sort(observed.begin(), observed.end());
        const std::size_t m = observed.size();
        imp.fill(j) = m % 2 ? observed[m / 2] : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
        break;
      }
    }
  }
  return imp;
}

inline Table impute_missing(const Table& table, ImputeStrategy strategy) {
  return fit_imputer(table, strategy).apply(table);
}

// ---------------------------------------------------------------------------
// Stratified split

/// Per-class test counts: floor(count * fraction) plus largest-remainder
/// top-up so the total is round(n * fraction). Each class keeps at least one
/// row on each side.
inline SplitPair stratified_split(const Table& table, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  int n_classes = 0;
  for (int l : table.labels) n_classes = std::max(n_classes, l + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_classes));
  for (std::size_t r = 0; r < table.labels.size(); ++r) members[static_cast<std::size_t>(table.labels[r])].push_back(r);
  for (std::size_t c = 0; c < members.size(); ++c)
    if (members[c].size() < 2)
      throw DataError("stratified_split: class " + std::to_string(c) + " has fewer than 2 rows");

  const std::size_t n = table.rows();
  std::vector<std::size_t> quota(members.size());
  std::vector<double> remainder(members.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const double ideal = static_cast<double>(members[c].size()) * test_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(ideal));
    remainder[c] = ideal - std::floor(ideal);
    assigned += quota[c];
  }
  const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < target && k < order.size(); ++k) {
    if (remainder[order[k]] > 0.0) {
      ++quota[order[k]];
      ++assigned;
    }
  }
  for (std::size_t c = 0; c < members.size(); ++c) quota[c] = std::clamp<std::size_t>(quota[c], 1, members[c].size() - 1);

  Rng rng(seed + seed_offset::split);
  SplitPair split;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto rows = members[c];
    rng.shuffle(rows);
    split.test_rows.insert(split.test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    split.train_rows.insert(split.train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(quota[c]), rows.end());
  }
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  split.train = table.select_rows(split.train_rows);
  split.test = table.select_rows(split.test_rows);
  return split;
}

// ---------------------------------------------------------------------------
// Min-max normalization

/// (x - min) / (max - min) with statistics from the training split. Constant
/// features use a unit scale, so they map to 0 and invert exactly.
struct Normalizer {
  Vector min;
  Vector scale;

  Matrix apply(const Matrix& x) const {
    return ((x.rowwise() - min.transpose()).array().rowwise() / scale.transpose().array()).matrix();
  }
  Matrix invert(const Matrix& x) const {
    return ((x.array().rowwise() * scale.transpose().array()).matrix().rowwise() + min.transpose());
  }
  Table apply(Table t) const {
    t.features = apply(t.features);
    return t;
  }
  Table invert(Table t) const {
    t.features = invert(t.features);
    return t;
  }
};

inline Normalizer fit_normalizer(const Table& train) {
  Normalizer norm;
  const Eigen::Index d = train.features.cols();
  norm.min.resize(d);
  norm.scale.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = train.features.col(j).minCoeff();
    const double hi = train.features.col(j).maxCoeff();
    norm.min(j) = lo;
    norm.scale(j) = hi > lo ? hi - lo : 1.0;
  }
  return norm;
}

}  // namespace synthcal
