// Timing comparison between the serial reference kernels and their OpenMP
// counterparts: dataset accuracy evaluation and one optimizer step.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "qglm/bas.hpp"
#include "qglm/eval.hpp"
#include "qglm/svo.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_per_call(const std::function<void()>& fn, int repeats) {
  fn();  // warm up
  const auto start = Clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const std::chrono::duration<double> elapsed = Clock::now() - start;
  return elapsed.count() / repeats;
}

void print_row(const char* name, double serial_s, double parallel_s) {
  std::printf("%-24s %10.3f ms %10.3f ms %8.2fx\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP kernel timings"};
  int side = 4;
  int hidden = 32;
  int samples = 256;
  int eval_k = 100;
  int repeats = 5;
  int threads = omp_get_max_threads();
  app.add_option("--d", side, "Grid side")->capture_default_str();
  app.add_option("--hidden", hidden, "Hidden neurons")->capture_default_str();
  app.add_option("--samples", samples, "Dataset size")->capture_default_str();
  app.add_option("--k", eval_k, "Forward passes per prediction")
      ->capture_default_str();
  app.add_option("--repeats", repeats, "Timing repeats")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  qglm::BasConfig bas_cfg;
  bas_cfg.side = side;
  bas_cfg.n_train = samples;
  bas_cfg.n_test = samples;
  bas_cfg.positive_fraction = 0.1;
  bas_cfg.seed = 11;
  const qglm::Dataset data = qglm::generate_dataset(bas_cfg).train;

  qglm::ModelConfig model;
  model.input_size = static_cast<std::size_t>(side) * side;
  model.hidden_count = hidden;

  qglm::SeededRng rng(3);
  qglm::VariationalParams phi =
      qglm::VariationalParams::zeros(model.hidden_count, model.input_size);
  for (double& v : phi.values) v = 2.0 * rng.uniform() - 1.0;
  const qglm::ModelWeights weights = qglm::sample_weights(phi, rng);

  std::printf("threads=%d, d=%d, hidden=%d, samples=%d, k=%d\n", threads, side,
              hidden, samples, eval_k);
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  const double acc_serial = seconds_per_call(
      [&] {
        qglm::eval::model_accuracy_serial(data, weights, model, eval_k, 99);
      },
      repeats);
  const double acc_parallel = seconds_per_call(
      [&] {
        qglm::eval::model_accuracy(data, weights, model, eval_k, 99, threads);
      },
      repeats);
  print_row("model_accuracy", acc_serial, acc_parallel);

  const double ens_serial = seconds_per_call(
      [&] {
        qglm::eval::ensemble_accuracy_serial(data, weights.quantum,
                                             model.hidden_response);
      },
      repeats * 10);
  const double ens_parallel = seconds_per_call(
      [&] {
        qglm::eval::ensemble_accuracy(data, weights.quantum,
                                      model.hidden_response, threads);
      },
      repeats * 10);
  print_row("ensemble_accuracy", ens_serial, ens_parallel);

  qglm::SvoConfig svo_cfg;
  svo_cfg.batch_size = std::min<int>(svo_cfg.batch_size, samples);
  const auto step = [&](int step_threads) {
    qglm::VariationalParams phi_copy = phi;
    qglm::BaselineState baseline =
        qglm::BaselineState::zeros(phi.size(), svo_cfg.gamma);
    std::span<const qglm::Sample> batch(data.samples.data(),
                                        svo_cfg.batch_size);
    for (int i = 0; i < 20; ++i) {
      qglm::svo_step(phi_copy, baseline, batch, model, svo_cfg, data.size(), i,
                     1000 + i, step_threads);
    }
  };
  const double step_serial = seconds_per_call([&] { step(1); }, repeats);
  const double step_parallel =
      seconds_per_call([&] { step(threads); }, repeats);
  print_row("svo_step x20", step_serial, step_parallel);
  return 0;
}
