// synthcal command-line driver.
//
//   synthcal generate|calibrate|evaluate|pipeline --config <path> [--seed N] [--method NAME] [--out DIR] [--input CSV]
//
// Exit codes: 0 success, 2 config/IO error, 3 numerical divergence, 4 schema mismatch.

#include "synthcal/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kDivergence = 3, kSchema = 4 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string out;
  std::string input;
};

synthcal::PipelineConfig resolve(const Options& o) {
  auto cfg = synthcal::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.method.empty()) cfg.method = synthcal::parse_calibration_method(o.method);
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

int run(const std::string& command, const Options& o) {
  using namespace synthcal;
  const PipelineConfig cfg = resolve(o);
  RunManifest manifest(cfg, command);
  if (command == "pipeline") {
    const auto out = run_pipeline(cfg, manifest);
    manifest.finish();
    std::cout << "method,wd,ks,nnaa,utility_accuracy,utility_f1,overall\n";
    for (std::size_t k = 0; k < out.methods.size(); ++k) {
      const auto& r = out.reports[k];
      std::cout << to_string(out.methods[k]) << ',' << r.mean_wd << ',' << r.mean_ks << ',' << r.nnaa << ','
                << r.utility_accuracy << ',' << r.utility_f1 << ',' << r.overall << '\n';
    }
    return kOk;
  }
  const PreparedData data = prepare_data(cfg);
  for (const auto& w : data.warnings) {
    manifest.warn(w);
    std::cerr << "warning: " << w << '\n';
  }
  if (command == "generate") {
    const auto gen = run_generate(cfg, data, manifest);
    std::cout << "weights";
    for (std::size_t m = 0; m < gen.bundle.size(); ++m) std::cout << ' ' << gen.bundle.names[m] << '=' << gen.weights.weights(static_cast<Eigen::Index>(m));
    std::cout << '\n';
  } else if (command == "calibrate") {
    const fs::path input = o.input.empty() ? cfg.output_dir / kRawSyntheticFile : fs::path(o.input);
    run_calibrate(cfg, data, cfg.method, input, manifest);
    std::cout << "wrote " << (cfg.output_dir / calibrated_file(cfg.method)).string() << '\n';
  } else if (command == "evaluate") {
    fs::path input = cfg.output_dir / calibrated_file(cfg.method);
    std::string label = to_string(cfg.method);
    if (!o.input.empty()) {
      input = o.input;
      label = input.stem().string();
    }
    const auto report = run_evaluate(cfg, data, input, label, manifest);
    std::cout << to_json(report).dump(2) << '\n';
  }
  manifest.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrated hybrid synthetic tabular data"};
  app.require_subcommand(1);
  Options opts;
  for (const char* name : {"generate", "calibrate", "evaluate", "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "Pipeline JSON config")->required();
    sub->add_option("--seed", opts.seed, "Override the master seed");
    sub->add_option("--method", opts.method, "Calibration method: raw|moment|full|soft|adaptive|iterative");
    sub->add_option("--out", opts.out, "Output directory");
    if (std::string(name) == "calibrate" || std::string(name) == "evaluate")
      sub->add_option("--input", opts.input, "Synthetic CSV to read (defaults inside the output directory)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opts);
  } catch (const synthcal::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kSchema;
  } catch (const synthcal::DivergenceError& e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const synthcal::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}
