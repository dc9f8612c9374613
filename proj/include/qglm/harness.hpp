#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qglm/bas.hpp"
#include "qglm/core.hpp"
#include "qglm/model.hpp"
#include "qglm/signflip.hpp"
#include "qglm/svo.hpp"

namespace qglm::harness {

inline constexpr std::string_view kVersion = "0.1.0";

// Full experiment description. Defaults reproduce the reference run:
// 4x4 grids, 30+30 samples, 32 hidden neurons, 4000 iterations, 5 trials.
struct ExperimentConfig {
  ModelConfig model;
  std::string method = "svo";  // "svo" or "signflip"
  SvoConfig svo;
  SignFlipConfig signflip;
  BasConfig bas;
  int trials = 5;
  int record_every = 10;
  int eval_k = 100;
  int jobs = 0;  // 0 = all available cores
  // When set, datasets are loaded from these CSV files instead of generated.
  std::string train_data;
  std::string test_data;

  void validate() const;
};

// Key/value config file (JSON). Missing keys keep their defaults; unknown
// keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
std::string resolved_config_json(const ExperimentConfig& cfg);

struct ExperimentSummary {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> trial_csvs;
  std::filesystem::path mean_curve_csv;
  std::filesystem::path metadata_file;
  double final_mean_test_accuracy = 0.0;
  double final_mean_train_accuracy = 0.0;
};

// Runs `trials` independent trainings (seeds seed+0 .. seed+trials-1),
// writes one CSV per trial, a mean/std curve CSV, the datasets used and a
// metadata file with the fully resolved config. Deterministic given the
// config; the output bytes do not depend on the job count.
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir);

// Compares the measurement-circuit probability against the squared
// normalized inner product: exhaustively over all sign-vector pairs for
// n <= 4, over 10^4 seeded random pairs otherwise. Prints the maximum
// absolute deviation; returns 0 iff it stays below 1e-10.
int verify_circuit(int n, std::ostream& out);

// Loads a trained model file plus a dataset CSV and prints the accuracy.
double evaluate_model_file(const std::filesystem::path& model_path,
                           const std::filesystem::path& data_path, int k,
                           std::uint64_t seed, std::ostream& out);

// Trained-model files (JSON, type-tagged).
void save_variational_model(const std::filesystem::path& path,
                            const VariationalParams& phi,
                            const ModelConfig& model);
void save_ensemble_model(const std::filesystem::path& path,
                         std::span<const SignVector> weights,
                         const ModelConfig& model, double threshold);

// Metrics CSV helpers (fixed headers, LF line endings).
void write_records_csv(const std::filesystem::path& path,
                       std::span<const TrainRecord> records);
void write_mean_curve_csv(const std::filesystem::path& path,
                          std::span<const std::vector<TrainRecord>> trials);

}  // namespace qglm::harness
