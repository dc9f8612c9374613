#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "qglm/bas.hpp"
#include "qglm/harness.hpp"

namespace {

namespace fs = std::filesystem;
using qglm::harness::ExperimentConfig;

int run_generate_bas(const qglm::BasConfig& cfg, const fs::path& out_dir) {
  qglm::GeneratedData data = qglm::generate_dataset(cfg);
  fs::create_directories(out_dir);
  const fs::path train_path = out_dir / "train.csv";
  const fs::path test_path = out_dir / "test.csv";
  qglm::save_dataset(data.train, train_path);
  qglm::save_dataset(data.test, test_path);
  std::cout << "wrote " << data.train.size() << " train samples to "
            << train_path.string() << "\n"
            << "wrote " << data.test.size() << " test samples to "
            << test_path.string() << "\n";
  if (data.shared_positive_patterns > 0) {
    std::cout << "note: " << data.shared_positive_patterns
              << " positive patterns appear in both splits\n";
  }
  return 0;
}

int run_train(ExperimentConfig cfg, const fs::path& out_dir) {
  const auto summary = qglm::harness::run_experiment(cfg, out_dir);
  std::cout << "wrote " << summary.trial_csvs.size() << " trial CSVs, "
            << summary.mean_curve_csv.filename().string() << " and "
            << summary.metadata_file.filename().string() << " to "
            << summary.output_dir.string() << "\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "final mean accuracy: train %.4f, test %.4f\n",
                summary.final_mean_train_accuracy,
                summary.final_mean_test_accuracy);
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary-weight hybrid classifier trainer and circuit checker"};
  app.require_subcommand(1);

  // generate-bas
  qglm::BasConfig bas_cfg;
  std::string bas_out = "bas_data";
  auto* gen = app.add_subcommand("generate-bas",
                                 "Generate a Bars-and-Stripes dataset");
  gen->add_option("--d", bas_cfg.side, "Grid side length")
      ->capture_default_str();
  gen->add_option("--n-train", bas_cfg.n_train, "Training samples")
      ->capture_default_str();
  gen->add_option("--n-test", bas_cfg.n_test, "Test samples")
      ->capture_default_str();
  gen->add_option("--positive-fraction", bas_cfg.positive_fraction,
                  "Fraction of positive samples")
      ->capture_default_str();
  gen->add_option("--seed", bas_cfg.seed, "Generator seed")
      ->capture_default_str();
  gen->add_option("--out", bas_out, "Output directory")->capture_default_str();

  // train
  std::string method = "svo";
  std::string response_name;
  std::string config_path;
  std::string train_out = "run";
  int jobs = 0;
  int trials_override = -1;
  long iterations_override = -1;
  std::int64_t seed_override = -1;
  auto* train = app.add_subcommand("train", "Train a classifier ensemble");
  train->add_option("--method", method, "Training scheme: svo or signflip")
      ->check(CLI::IsMember({"svo", "signflip"}))
      ->capture_default_str();
  train->add_option("--response", response_name,
                    "Hidden response function: q, bq, bcq, l or sigmoid");
  train->add_option("--config", config_path, "JSON config file");
  train->add_option("--out", train_out, "Output directory")
      ->capture_default_str();
  train->add_option("--jobs", jobs, "Parallel jobs (0 = all cores)")
      ->capture_default_str();
  train->add_option("--trials", trials_override, "Override trial count");
  train->add_option("--iterations", iterations_override,
                    "Override training iterations");
  train->add_option("--seed", seed_override, "Override training seed");

  // evaluate
  std::string model_path, data_path;
  int eval_k = 100;
  std::uint64_t eval_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate",
                                      "Score a trained model on a dataset");
  evaluate->add_option("--model", model_path, "Trained model JSON file")
      ->required();
  evaluate->add_option("--data", data_path, "Dataset CSV file")->required();
  evaluate->add_option("--k", eval_k, "Forward passes per prediction")
      ->capture_default_str();
  evaluate->add_option("--seed", eval_seed, "Prediction seed")
      ->capture_default_str();

  // verify-circuit
  int circuit_n = 4;
  auto* verify = app.add_subcommand(
      "verify-circuit",
      "Check the measurement circuit against the quadratic response");
  verify->add_option("--n", circuit_n, "Vector length (2, 4, 8 or 16)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_generate_bas(bas_cfg, bas_out);
    if (train->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = qglm::harness::load_config(config_path);
      }
      if (train->count("--method") > 0 || config_path.empty()) {
        cfg.method = method;
      }
      if (!response_name.empty()) {
        cfg.model.hidden_response = qglm::parse_response_kind(response_name);
      }
      if (train->count("--jobs") > 0) cfg.jobs = jobs;
      if (trials_override >= 1) cfg.trials = trials_override;
      if (iterations_override >= 0) {
        cfg.svo.iterations = iterations_override;
        cfg.signflip.iterations = iterations_override;
      }
      if (seed_override >= 0) {
        cfg.svo.seed = static_cast<std::uint64_t>(seed_override);
        cfg.signflip.seed = static_cast<std::uint64_t>(seed_override);
      }
      return run_train(std::move(cfg), train_out);
    }
    if (evaluate->parsed()) {
      qglm::harness::evaluate_model_file(model_path, data_path, eval_k,
                                         eval_seed, std::cout);
      return 0;
    }
    if (verify->parsed()) {
      return qglm::harness::verify_circuit(circuit_n, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
