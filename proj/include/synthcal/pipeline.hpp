#pragma once

// End-to-end orchestration: load -> preprocess -> generate -> learn weights
// -> calibrate -> evaluate, driven by a JSON config. Every command writes into
// one output directory and leaves a manifest listing what it wrote.

#include "synthcal/calibration.hpp"
#include "synthcal/common.hpp"
#include "synthcal/data.hpp"
#include "synthcal/generators.hpp"
#include "synthcal/hybridizer.hpp"
#include "synthcal/metrics.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace synthcal {

inline constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

struct MetricsConfig {
  bool nnaa = true;
  bool utility = true;
  bool pca = true;
  bool histograms = true;
  bool correlation = true;
  int histogram_bins = 20;
  ClassifierConfig classifier;
};

struct PipelineConfig {
  fs::path dataset_path;
  std::string dataset_path_text;  // as written in the config
  std::string target = "class";
  std::string missing_token;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  ImputeStrategy impute = ImputeStrategy::mean;
  std::string impute_name = "mean";
  GeneratorConfig generators;
  PolicyConfig rl;
  CalibrationMethod method = CalibrationMethod::full;
  CalibrationParams calibration;
  MetricsConfig metrics;
  fs::path output_dir = "out";
  bool record_timings = false;
};

namespace detail {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return j.at(key);
}

}  // namespace detail

/// Parses a config document. Relative dataset paths resolve against base_dir.
inline PipelineConfig parse_config(const json& j, const fs::path& base_dir = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  const json& ds = detail::section(j, "dataset");
  detail::read_opt(ds, "path", c.dataset_path_text);
  if (c.dataset_path_text.empty()) throw ConfigError("config: dataset.path is required");
  c.dataset_path = fs::path(c.dataset_path_text).is_absolute() ? fs::path(c.dataset_path_text) : base_dir / c.dataset_path_text;
  detail::read_opt(ds, "target", c.target);
  detail::read_opt(ds, "missing_token", c.missing_token);

  detail::read_opt(j, "test_fraction", c.test_fraction);
  detail::read_opt(j, "seed", c.seed);
  detail::read_opt(j, "impute", c.impute_name);
  c.impute = parse_impute_strategy(c.impute_name);
  std::string out_dir;
  detail::read_opt(j, "output_dir", out_dir);
  if (!out_dir.empty()) c.output_dir = fs::path(out_dir).is_absolute() ? fs::path(out_dir) : base_dir / out_dir;
  detail::read_opt(j, "record_timings", c.record_timings);

  const json& g = detail::section(j, "generators");
  detail::read_opt(g, "sigma", c.generators.sigma);
  detail::read_opt(g, "gmm_k", c.generators.gmm.components);
  detail::read_opt(g, "gmm_max_iter", c.generators.gmm.max_iter);
  detail::read_opt(g, "gmm_tol", c.generators.gmm.tol);
  detail::read_opt(g, "latent_dim", c.generators.cvae.latent_dim);
  detail::read_opt(g, "hidden", c.generators.cvae.hidden);
  detail::read_opt(g, "epochs", c.generators.cvae.epochs);
  detail::read_opt(g, "batch", c.generators.cvae.batch);
  detail::read_opt(g, "cvae_lr", c.generators.cvae.learning_rate);

  const json& rl = detail::section(j, "rl");
  detail::read_opt(rl, "episodes", c.rl.episodes);
  detail::read_opt(rl, "policy_hidden", c.rl.hidden);
  detail::read_opt(rl, "exploration_std", c.rl.exploration_std);
  detail::read_opt(rl, "policy_lr", c.rl.learning_rate);
  detail::read_opt(rl, "baseline_decay", c.rl.baseline_decay);

  const json& cal = detail::section(j, "calibration");
  std::string method = "full";
  detail::read_opt(cal, "method", method);
  c.method = parse_calibration_method(method);
  detail::read_opt(cal, "alpha", c.calibration.alpha);
  detail::read_opt(cal, "beta", c.calibration.adaptive.beta);
  detail::read_opt(cal, "tau", c.calibration.adaptive.tau);
  detail::read_opt(cal, "eq14_as_printed", c.calibration.adaptive.as_printed);
  detail::read_opt(cal, "eps", c.calibration.eps);
  detail::read_opt(cal, "max_iter", c.calibration.max_iter);
  detail::read_opt(cal, "tol", c.calibration.tol);
  detail::read_opt(cal, "iterative_per_feature", c.calibration.iterative_per_feature);

  const json& m = detail::section(j, "metrics");
  detail::read_opt(m, "nnaa", c.metrics.nnaa);
  detail::read_opt(m, "utility", c.metrics.utility);
  detail::read_opt(m, "pca", c.metrics.pca);
  detail::read_opt(m, "histograms", c.metrics.histograms);
  detail::read_opt(m, "correlation", c.metrics.correlation);
  detail::read_opt(m, "histogram_bins", c.metrics.histogram_bins);
  std::string clf = "logistic";
  detail::read_opt(m, "classifier", clf);
  c.metrics.classifier.kind = parse_classifier_kind(clf);
  detail::read_opt(m, "classifier_epochs", c.metrics.classifier.epochs);
  detail::read_opt(m, "classifier_lr", c.metrics.classifier.learning_rate);
  detail::read_opt(m, "classifier_l2", c.metrics.classifier.l2);
  detail::read_opt(m, "knn_k", c.metrics.classifier.k);

  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw ConfigError("config: test_fraction must lie in (0, 1)");
  if (c.metrics.histogram_bins < 2) throw ConfigError("config: metrics.histogram_bins must be >= 2");
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(j, path.parent_path());
}

/// Effective configuration, excluding the output directory so that runs into
/// different directories stay byte-comparable.
inline json config_snapshot(const PipelineConfig& c) {
  const auto& g = c.generators;
  const auto& cal = c.calibration;
  const auto& m = c.metrics;
  return {
      {"dataset", {{"path", c.dataset_path_text}, {"target", c.target}, {"missing_token", c.missing_token}}},
      {"test_fraction", c.test_fraction},
      {"seed", c.seed},
      {"impute", c.impute_name},
      {"generators",
       {{"sigma", g.sigma}, {"gmm_k", g.gmm.components}, {"gmm_max_iter", g.gmm.max_iter}, {"gmm_tol", g.gmm.tol},
        {"latent_dim", g.cvae.latent_dim}, {"hidden", g.cvae.hidden}, {"epochs", g.cvae.epochs},
        {"batch", g.cvae.batch}, {"cvae_lr", g.cvae.learning_rate}}},
      {"rl",
       {{"episodes", c.rl.episodes}, {"policy_hidden", c.rl.hidden}, {"exploration_std", c.rl.exploration_std},
        {"policy_lr", c.rl.learning_rate}, {"baseline_decay", c.rl.baseline_decay}}},
      {"calibration",
       {{"method", to_string(c.method)}, {"alpha", cal.alpha}, {"beta", cal.adaptive.beta}, {"tau", cal.adaptive.tau},
        {"eq14_as_printed", cal.adaptive.as_printed}, {"eps", cal.eps}, {"max_iter", cal.max_iter}, {"tol", cal.tol},
        {"iterative_per_feature", cal.iterative_per_feature}}},
      {"metrics",
       {{"nnaa", m.nnaa}, {"utility", m.utility}, {"pca", m.pca}, {"histograms", m.histograms},
        {"correlation", m.correlation}, {"histogram_bins", m.histogram_bins},
        {"classifier", m.classifier.kind == ClassifierKind::knn ? "knn" : "logistic"},
        {"classifier_epochs", m.classifier.epochs}, {"classifier_lr", m.classifier.learning_rate},
        {"classifier_l2", m.classifier.l2}, {"knn_k", m.classifier.k}}},
      {"record_timings", c.record_timings}};
}

// ---------------------------------------------------------------------------
// Preprocessing

struct PreparedData {
  Schema schema;
  Normalizer normalizer;
  Table train;  // imputed + normalized
  Table test;   // imputed + normalized with train statistics
  std::vector<std::string> warnings;
};

/// Split first, then fit imputation and normalization on the training rows only.
inline PreparedData prepare_data(const PipelineConfig& c) {
  if (!fs::exists(c.dataset_path)) throw ConfigError("dataset not found: '" + c.dataset_path.string() + "'");
  Dataset ds = load_csv(c.dataset_path, c.target, c.missing_token);
  PreparedData p;
  p.schema = ds.schema;
  SplitPair split = stratified_split(ds.table, c.test_fraction, c.seed);
  const Imputer imp = fit_imputer(split.train, c.impute);
  for (auto j : imp.all_missing_features)
    p.warnings.push_back("feature '" + p.schema.feature_names[j] + "' has no observed training values; filled with 0");
  const Table train = imp.apply(split.train);
  const Table test = imp.apply(split.test);
  p.normalizer = fit_normalizer(train);
  p.train = p.normalizer.apply(train);
  p.test = p.normalizer.apply(test);
  return p;
}

// ---------------------------------------------------------------------------
// Run bookkeeping

/// Files written and data splits touched by one CLI invocation.
class RunManifest {
 public:
  RunManifest(const PipelineConfig& c, std::string command) : config_(c), command_(std::move(command)) {
    fs::create_directories(config_.output_dir);
  }

  const fs::path& dir() const { return config_.output_dir; }

  /// Writes `content` to dir/name and records it once.
  void write(const std::string& name, const std::string& content) {
    const fs::path path = config_.output_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
    if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
  }

  void touch(const std::string& stage, const std::string& split) { access_[stage].insert(split); }
  void seed(const std::string& stage, std::uint64_t value) { seeds_[stage] = value; }
  void warn(const std::string& msg) {
    if (std::find(warnings_.begin(), warnings_.end(), msg) == warnings_.end()) warnings_.push_back(msg);
  }
  void time(const std::string& stage, double seconds) { seconds_[stage] += seconds; }

  void finish() {
    json j;
    j["tool"] = "synthcal";
    j["version"] = kVersion;
    j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    j["command"] = command_;
    j["config"] = config_snapshot(config_);
    j["seeds"] = seeds_;
    json access = json::object();
    for (const auto& [stage, splits] : access_) access[stage] = std::vector<std::string>(splits.begin(), splits.end());
    j["data_access"] = access;
    j["warnings"] = warnings_;
    if (config_.record_timings) j["stage_seconds"] = seconds_;
    auto listed = outputs_;
    listed.push_back("manifest.json");
    j["outputs"] = listed;
    const fs::path path = config_.output_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
  }

  const std::vector<std::string>& outputs() const { return outputs_; }

 private:
  const PipelineConfig& config_;
  std::string command_;
  std::vector<std::string> outputs_;
  std::map<std::string, std::set<std::string>> access_;
  std::map<std::string, std::uint64_t> seeds_;
  std::map<std::string, double> seconds_;
  std::vector<std::string> warnings_;
};

namespace detail {

/// Runs fn, prefixing any library error with the stage name (type preserved).
template <class Fn>
auto run_stage(RunManifest& manifest, const std::string& stage, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    manifest.time(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      elapsed();
    } else {
      auto result = fn();
      elapsed();
      return result;
    }
  } catch (const ConfigError& e) {
    throw ConfigError("stage '" + stage + "': " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError("stage '" + stage + "': " + e.what());
  } catch (const DivergenceError& e) {
    throw DivergenceError("stage '" + stage + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage '" + stage + "': " + e.what());
  }
}

inline std::string vector_csv(const std::string& header, const std::vector<double>& values) {
  std::string out = "index," + header + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) out += std::to_string(i) + "," + format_double(values[i]) + "\n";
  return out;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

inline std::string method_label(CalibrationMethod m, double alpha) {
  switch (m) {
    case CalibrationMethod::raw: return "Raw Hybrid";
    case CalibrationMethod::moment: return "Moment Matching";
    case CalibrationMethod::full: return "Full Histogram";
    case CalibrationMethod::soft: return "Soft Histogram (alpha=" + format_double(alpha) + ")";
    case CalibrationMethod::adaptive: return "Adaptive Soft Histogram";
    case CalibrationMethod::iterative: return "Iterative Soft Histogram";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Commands

struct GenerateOutput {
  GeneratorBundle bundle;
  TrainedWeights weights;
  Matrix hybrid;  // normalized
};

inline const std::string kRawSyntheticFile = "synthetic_raw.csv";

inline std::string calibrated_file(CalibrationMethod m) { return "calibrated_" + to_string(m) + ".csv"; }

/// Generators + learned weights. Writes synthetic_raw.csv (original units),
/// weights.json and reward_trace.csv.
inline GenerateOutput run_generate(const PipelineConfig& c, const PreparedData& data, RunManifest& manifest) {
  GenerateOutput out;
  manifest.touch("generate", "train");
  manifest.seed("generators", c.seed);
  manifest.seed("policy", c.seed + seed_offset::policy);
  out.bundle = detail::run_stage(manifest, "generate", [&] {
    return generate_bundle(data.train, static_cast<int>(data.schema.n_classes()), c.generators, c.seed);
  });
  out.weights = detail::run_stage(manifest, "hybridize", [&] {
    return train_weights(out.bundle, data.train.features, c.rl, c.seed + seed_offset::policy);
  });
  out.hybrid = combine_hybrid(out.bundle, out.weights.weights);

  manifest.write(kRawSyntheticFile,
                 to_csv(data.schema, data.normalizer.invert(out.hybrid), data.train.labels));
  json w;
  w["generators"] = out.bundle.names;
  w["weights"] = detail::to_std(out.weights.weights);
  w["final_baseline"] = out.weights.policy.baseline;
  json per_gen = json::object();
  for (std::size_t m = 0; m < out.bundle.size(); ++m)
    per_gen[out.bundle.names[m]] = mean_wasserstein(out.bundle.outputs[m], data.train.features);
  w["generator_mean_wd"] = per_gen;
  w["hybrid_mean_wd"] = mean_wasserstein(out.hybrid, data.train.features);
  w["cvae_epoch_loss_first"] = out.bundle.cvae_epoch_loss.front();
  w["cvae_epoch_loss_last"] = out.bundle.cvae_epoch_loss.back();
  w["policy"] = nn::to_json(out.weights.policy.net);
  manifest.write("weights.json", w.dump(2) + "\n");
  std::string trace = "episode,reward\n";
  for (std::size_t e = 0; e < out.weights.reward_trace.size(); ++e)
    trace += std::to_string(e) + "," + format_double(out.weights.reward_trace[e]) + "\n";
  manifest.write("reward_trace.csv", trace);
  return out;
}

/// Reads a synthetic CSV (original units) and normalizes it with train statistics.
inline Table read_synthetic(const fs::path& path, const PreparedData& data) {
  if (!fs::exists(path)) throw ConfigError("synthetic data not found: '" + path.string() + "'");
  return data.normalizer.apply(load_csv_with_schema(path, data.schema));
}

inline CalibrationResult run_calibrate(const PipelineConfig& c, const PreparedData& data, CalibrationMethod method,
                                       const fs::path& input, RunManifest& manifest) {
  manifest.touch("calibrate", "train");
  const std::string name = calibrated_file(method);
  if (method == CalibrationMethod::raw) {
    // Pass-through: copy the file verbatim.
    if (!fs::exists(input)) throw ConfigError("synthetic data not found: '" + input.string() + "'");
    load_csv_with_schema(input, data.schema);
    std::ifstream in(input, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    manifest.write(name, buf.str());
    CalibrationResult res;
    res.method = method;
    manifest.write("calibration_raw.json", json{{"method", "raw"}}.dump(2) + "\n");
    return res;
  }
  const Table synth = read_synthetic(input, data);
  CalibrationResult res = detail::run_stage(manifest, "calibrate:" + to_string(method), [&] {
    return calibrate(method, synth.features, data.train.features, c.calibration);
  });
  for (auto j : res.degenerate_features)
    manifest.warn("moment calibration: feature '" + data.schema.feature_names[j] +
                  "' has zero synthetic spread; set to the real mean");
  manifest.write(name, to_csv(data.schema, data.normalizer.invert(res.calibrated), synth.labels));

  json j;
  j["method"] = to_string(method);
  j["per_feature_alpha"] = detail::to_std(res.per_feature_alpha);
  j["alpha_trace"] = res.alpha_trace;
  j["wd_trace"] = res.wd_trace;
  std::vector<std::string> degenerate;
  for (auto f : res.degenerate_features) degenerate.push_back(data.schema.feature_names[f]);
  j["degenerate_features"] = degenerate;
  j["mean_wd_before"] = mean_wasserstein(synth.features, data.train.features);
  j["mean_wd_after"] = mean_wasserstein(res.calibrated, data.train.features);
  manifest.write("calibration_" + to_string(method) + ".json", j.dump(2) + "\n");
  if (method == CalibrationMethod::iterative) manifest.write("wd_trace_iterative.csv", detail::vector_csv("mean_wd", res.wd_trace));
  return res;
}

inline EvaluationReport run_evaluate(const PipelineConfig& c, const PreparedData& data, const fs::path& input,
                                     const std::string& label, RunManifest& manifest) {
  const Table synth = read_synthetic(input, data);
  manifest.touch("evaluate", "train");
  if (c.metrics.utility) manifest.touch("evaluate", "test");
  manifest.seed("classifier", c.seed + seed_offset::classifier);
  EvaluationOptions opt;
  opt.nnaa = c.metrics.nnaa;
  opt.utility = c.metrics.utility;
  opt.classifier = c.metrics.classifier;
  opt.seed = c.seed + seed_offset::classifier;
  EvaluationReport report = detail::run_stage(manifest, "evaluate:" + label, [&] {
    return evaluate(data.train, synth, data.test, static_cast<int>(data.schema.n_classes()), opt);
  });
  for (const auto& w : data.warnings) report.warnings.push_back(w);
  json j = to_json(report);
  j["label"] = label;
  j["feature_names"] = data.schema.feature_names;

  if (c.metrics.pca && data.schema.n_features() >= 2) {
    const PcaProjection pca = pca_project(data.train.features, synth.features, 2);
    j["pca_explained_ratio"] = detail::to_std(pca.explained_ratio);
    std::string csv = "source,pc1,pc2\n";
    auto rows = [&](const Matrix& p, const char* src) {
      for (Eigen::Index i = 0; i < p.rows(); ++i)
        csv += std::string(src) + "," + format_double(p(i, 0)) + "," + format_double(p(i, 1)) + "\n";
    };
    rows(pca.real, "real");
    rows(pca.synth, "synthetic");
    manifest.write("pca_" + label + ".csv", csv);
  }
  if (c.metrics.histograms) {
    const auto hists = export_histograms(data.train.features, synth.features, c.metrics.histogram_bins);
    std::string csv = "feature,bin,left,right,real_density,synthetic_density\n";
    std::vector<std::string> clamped;
    for (std::size_t f = 0; f < hists.size(); ++f) {
      const auto& h = hists[f];
      if (h.clamped) clamped.push_back(data.schema.feature_names[f]);
      for (Eigen::Index b = 0; b < h.real_density.size(); ++b)
        csv += data.schema.feature_names[f] + "," + std::to_string(b) + "," + format_double(h.edges[static_cast<std::size_t>(b)]) +
               "," + format_double(h.edges[static_cast<std::size_t>(b) + 1]) + "," + format_double(h.real_density(b)) + "," +
               format_double(h.synth_density(b)) + "\n";
    }
    j["histogram_clamped_features"] = clamped;
    manifest.write("histograms_" + label + ".csv", csv);
  }
  if (c.metrics.correlation && data.schema.n_features() >= 2) {
    const Matrix cr = correlation_matrix(data.train.features);
    const Matrix cs = correlation_matrix(synth.features);
    std::string csv = "feature_a,feature_b,real,synthetic\n";
    for (Eigen::Index a = 0; a < cr.rows(); ++a)
      for (Eigen::Index b = 0; b < cr.cols(); ++b)
        csv += data.schema.feature_names[static_cast<std::size_t>(a)] + "," +
               data.schema.feature_names[static_cast<std::size_t>(b)] + "," + format_double(cr(a, b)) + "," +
               format_double(cs(a, b)) + "\n";
    manifest.write("correlation_" + label + ".csv", csv);
  }
  manifest.write("report_" + label + ".json", j.dump(2) + "\n");
  return report;
}

struct PipelineOutput {
  std::vector<CalibrationMethod> methods;
  std::vector<EvaluationReport> reports;
  std::vector<double> weights;
};

/// Generation once, then each calibration variant calibrated and evaluated.
/// Emits comparison.{csv,json} (distance/privacy/utility) and
/// fidelity.{csv,json} (shapes/pairs/overall).
inline PipelineOutput run_pipeline(const PipelineConfig& c, RunManifest& manifest) {
  const PreparedData data = detail::run_stage(manifest, "prepare", [&] { return prepare_data(c); });
  for (const auto& w : data.warnings) manifest.warn(w);
  manifest.seed("split", c.seed + seed_offset::split);
  const GenerateOutput gen = run_generate(c, data, manifest);

  PipelineOutput out;
  out.weights = detail::to_std(gen.weights.weights);
  const fs::path raw = manifest.dir() / kRawSyntheticFile;
  for (auto method : all_calibration_methods()) {
    run_calibrate(c, data, method, raw, manifest);
    out.methods.push_back(method);
    out.reports.push_back(run_evaluate(c, data, manifest.dir() / calibrated_file(method), to_string(method), manifest));
  }

  std::string comparison = "method,label,wd,ks,nnaa,utility_accuracy,utility_f1\n";
  std::string fidelity = "method,label,column_shapes,pair_trends,overall\n";
  json cj = json::array(), fj = json::array();
  for (std::size_t k = 0; k < out.methods.size(); ++k) {
    const auto& r = out.reports[k];
    const std::string key = to_string(out.methods[k]);
    const std::string label = method_label(out.methods[k], c.calibration.alpha);
    comparison += key + ",\"" + label + "\"," + format_double(r.mean_wd) + "," + format_double(r.mean_ks) + "," +
                  format_double(r.nnaa) + "," + format_double(r.utility_accuracy) + "," + format_double(r.utility_f1) + "\n";
    fidelity += key + ",\"" + label + "\"," + format_double(r.column_shapes) + "," + format_double(r.pair_trends) + "," +
                format_double(r.overall) + "\n";
    cj.push_back({{"method", key}, {"label", label}, {"wd", r.mean_wd}, {"ks", r.mean_ks}, {"nnaa", r.nnaa},
                  {"utility_accuracy", r.utility_accuracy}, {"utility_f1", r.utility_f1}});
    fj.push_back({{"method", key}, {"label", label}, {"column_shapes", r.column_shapes},
                  {"pair_trends", r.pair_trends}, {"overall", r.overall}});
  }
  manifest.write("comparison.csv", comparison);
  manifest.write("comparison.json", cj.dump(2) + "\n");
  manifest.write("fidelity.csv", fidelity);
  manifest.write("fidelity.json", fj.dump(2) + "\n");
  return out;
}

}  // namespace synthcal
