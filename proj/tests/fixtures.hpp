#pragma once

#include "synthcal/pipeline.hpp"

#include <string>

#ifndef SYNTHCAL_DATA_DIR
#error "SYNTHCAL_DATA_DIR must point at the bundled datasets"
#endif

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(SYNTHCAL_DATA_DIR) + "/" + name; }

inline synthcal::PipelineConfig original_config() {
  synthcal::PipelineConfig c;
  c.dataset_path = data_path("breast_cancer_original.csv");
  c.dataset_path_text = "breast_cancer_original.csv";
  c.target = "class";
  c.missing_token = "?";
  return c;
}

inline synthcal::PipelineConfig diagnostic_config() {
  synthcal::PipelineConfig c;
  c.dataset_path = data_path("breast_cancer_diagnostic.csv");
  c.dataset_path_text = "breast_cancer_diagnostic.csv";
  c.target = "diagnosis";
  return c;
}


/// The prepared data, generator bundle and learned hybrid for one config.
struct HybridRun {
  synthcal::PreparedData data;
  synthcal::GeneratorBundle bundle;
  synthcal::TrainedWeights weights;
  synthcal::Matrix hybrid;

  int n_classes() const { return static_cast<int>(data.schema.n_classes()); }
  const synthcal::Matrix& real() const { return data.train.features; }
};

inline HybridRun build_hybrid(const synthcal::PipelineConfig& c) {
  using namespace synthcal;
  HybridRun run;
  run.data = prepare_data(c);
  run.bundle = generate_bundle(run.data.train, run.n_classes(), c.generators, c.seed);
  run.weights = train_weights(run.bundle, run.real(), c.rl, c.seed + seed_offset::policy);
  run.hybrid = combine_hybrid(run.bundle, run.weights.weights);
  return run;
}

}  // namespace fixtures
