#include "qglm/svo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qglm/eval.hpp"

namespace qglm {

namespace {

void require_param_shapes(const VariationalParams& phi, const ModelWeights& w) {
  if (w.hidden_count() != phi.hidden_count || w.input_size() != phi.input_size) {
    throw std::invalid_argument("weights shaped " +
                                std::to_string(w.hidden_count()) + "x" +
                                std::to_string(w.input_size()) +
                                " do not match variational parameters " +
                                std::to_string(phi.hidden_count) + "x" +
                                std::to_string(phi.input_size));
  }
}

}  // namespace

VariationalParams VariationalParams::zeros(std::size_t hidden_count,
                                           std::size_t input_size) {
  VariationalParams phi;
  phi.hidden_count = hidden_count;
  phi.input_size = input_size;
  phi.values.assign(hidden_count * input_size + hidden_count, 0.0);
  return phi;
}

BaselineState BaselineState::zeros(std::size_t size, double gamma) {
  BaselineState state;
  state.numerator_avg.assign(size, 0.0);
  state.denominator_avg.assign(size, 0.0);
  state.gamma = gamma;
  return state;
}

void SvoConfig::validate() const {
  if (weight_samples < 1) throw std::invalid_argument("need T >= 1 weight samples");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(eta_base > 0.0 && eta_base <= eta_max)) {
    throw std::invalid_argument("need 0 < eta_base <= eta_max");
  }
  if (step_size < 1) throw std::invalid_argument("step size must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("baseline decay must lie in (0, 1)");
  }
}

ModelWeights sample_weights(const VariationalParams& phi, SeededRng& rng) {
  ModelWeights w;
  w.quantum.reserve(phi.hidden_count);
  for (std::size_t m = 0; m < phi.hidden_count; ++m) {
    std::vector<Sign> row(phi.input_size);
    for (std::size_t n = 0; n < phi.input_size; ++n) {
      row[n] = static_cast<Sign>(sample_sign(sigmoid(phi.quantum(m, n)), rng));
    }
    w.quantum.emplace_back(std::move(row));
  }
  std::vector<Sign> cls(phi.hidden_count);
  for (std::size_t m = 0; m < phi.hidden_count; ++m) {
    cls[m] = static_cast<Sign>(sample_sign(sigmoid(phi.classical(m)), rng));
  }
  w.classical = SignVector(std::move(cls));
  return w;
}

std::vector<double> log_q_gradient(const VariationalParams& phi,
                                   const ModelWeights& w) {
  require_param_shapes(phi, w);
  std::vector<double> grad(phi.size());
  std::size_t i = 0;
  for (std::size_t m = 0; m < phi.hidden_count; ++m) {
    for (std::size_t n = 0; n < phi.input_size; ++n, ++i) {
      grad[i] = 0.5 * (1 + w.quantum[m][n]) - sigmoid(phi.values[i]);
    }
  }
  for (std::size_t m = 0; m < phi.hidden_count; ++m, ++i) {
    grad[i] = 0.5 * (1 + w.classical[m]) - sigmoid(phi.values[i]);
  }
  return grad;
}

double batch_loss(std::span<const Sample> batch, const ModelWeights& w,
                  const ModelConfig& cfg, std::size_t dataset_size,
                  SeededRng& rng) {
  if (batch.empty()) throw std::invalid_argument("batch must not be empty");
  double acc = 0.0;
  for (const Sample& sample : batch) {
    acc += loss_bound_estimate(sample, w, cfg, rng);
  }
  return acc * static_cast<double>(dataset_size) /
         static_cast<double>(batch.size());
}

double batch_bound(std::span<const Sample> batch, const ModelWeights& w,
                   const ModelConfig& cfg, std::size_t dataset_size) {
  if (batch.empty()) throw std::invalid_argument("batch must not be empty");
  double acc = 0.0;
  for (const Sample& sample : batch) {
    acc += loss_bound_analytic(sample, w, cfg);
  }
  return acc * static_cast<double>(dataset_size) /
         static_cast<double>(batch.size());
}

void update_baseline(BaselineState& state, double loss,
                     std::span<const double> grad) {
  if (grad.size() != state.numerator_avg.size()) {
    throw std::invalid_argument("baseline state size mismatch");
  }
  const double g = state.gamma;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g2 = grad[i] * grad[i];
    state.numerator_avg[i] = g * state.numerator_avg[i] + (1.0 - g) * loss * g2;
    state.denominator_avg[i] = g * state.denominator_avg[i] + (1.0 - g) * g2;
  }
}

double cyclical_lr(long iteration, const SvoConfig& cfg) {
  if (iteration < 0) throw std::invalid_argument("iteration must be >= 0");
  const double i = static_cast<double>(iteration);
  const double s = static_cast<double>(cfg.step_size);
  const double cycle = std::floor(1.0 + i / (2.0 * s));
  const double t = std::abs(i / s - 2.0 * cycle + 1.0);
  const double amplitude = 1.0 + std::sin(cycle * std::numbers::pi / 2.0);
  const double raw = cfg.eta_base + (cfg.eta_max - cfg.eta_base) *
                                        std::max(0.0, 1.0 - t) * amplitude;
  return std::clamp(raw, cfg.eta_base, cfg.eta_max);
}

std::vector<double> reinforce_update(std::span<const double> losses,
                                     std::span<const std::vector<double>> grads,
                                     const BaselineState& baseline) {
  if (losses.empty() || losses.size() != grads.size()) {
    throw std::invalid_argument("losses and gradients must pair up");
  }
  const std::size_t size = grads.front().size();
  std::vector<double> delta(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const double b = baseline.baseline(i);
    double acc = 0.0;
    for (std::size_t t = 0; t < losses.size(); ++t) {
      acc += (losses[t] - b) * grads[t][i];
    }
    delta[i] = acc / static_cast<double>(losses.size());
  }
  return delta;
}

StepMetrics svo_step(VariationalParams& phi, BaselineState& baseline,
                     std::span<const Sample> batch, const ModelConfig& model_cfg,
                     const SvoConfig& cfg, std::size_t dataset_size,
                     long iteration, std::uint64_t step_seed, int threads) {
  const int population = cfg.weight_samples;
  std::vector<double> losses(population, 0.0);
  std::vector<std::vector<double>> grads(population);

  // Each population member owns a child stream, so the result is identical
  // for any thread count.
#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1))
  for (int t = 0; t < population; ++t) {
    SeededRng rng(derive_seed(step_seed, stream::kWeightSample, t));
    const ModelWeights w = sample_weights(phi, rng);
    losses[t] = batch_bound(batch, w, model_cfg, dataset_size);
    grads[t] = log_q_gradient(phi, w);
  }

  for (int t = 0; t < population; ++t) {
    update_baseline(baseline, losses[t], grads[t]);
  }

  const double lr = cyclical_lr(iteration, cfg);
  const std::vector<double> delta = reinforce_update(losses, grads, baseline);
  StepMetrics metrics;
  metrics.lr = lr;
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    norm_sq += delta[i] * delta[i];
    phi.values[i] -= lr * delta[i];
  }
  metrics.grad_norm = std::sqrt(norm_sq);
  for (int t = 0; t < population; ++t) metrics.mean_loss += losses[t];
  metrics.mean_loss /= population;
  return metrics;
}

ModelWeights mode_weights(const VariationalParams& phi) {
  ModelWeights w;
  w.quantum.reserve(phi.hidden_count);
  for (std::size_t m = 0; m < phi.hidden_count; ++m) {
    std::vector<Sign> row(phi.input_size);
    for (std::size_t n = 0; n < phi.input_size; ++n) {
      row[n] = phi.quantum(m, n) >= 0.0 ? Sign{1} : Sign{-1};
    }
    w.quantum.emplace_back(std::move(row));
  }
  std::vector<Sign> cls(phi.hidden_count);
  for (std::size_t m = 0; m < phi.hidden_count; ++m) {
    cls[m] = phi.classical(m) >= 0.0 ? Sign{1} : Sign{-1};
  }
  w.classical = SignVector(std::move(cls));
  return w;
}

SvoResult train(const Dataset& train_set, const Dataset& test_set,
                const ModelConfig& model_cfg, const SvoConfig& cfg,
                const TrainOptions& options) {
  model_cfg.validate();
  cfg.validate();
  train_set.validate();
  test_set.validate();
  if (train_set.size() == 0 || test_set.size() == 0) {
    throw std::invalid_argument("training needs nonempty datasets");
  }
  if (train_set.input_size != model_cfg.input_size ||
      test_set.input_size != model_cfg.input_size) {
    throw std::invalid_argument("dataset input size does not match model");
  }
  if (options.record_every < 1) {
    throw std::invalid_argument("record_every must be >= 1");
  }

  SeededRng rng(cfg.seed);
  VariationalParams phi =
      VariationalParams::zeros(model_cfg.hidden_count, model_cfg.input_size);
  if (cfg.phi_init_scale > 0.0) {
    for (double& v : phi.values) {
      v = (2.0 * rng.uniform() - 1.0) * cfg.phi_init_scale;
    }
  }
  BaselineState baseline = BaselineState::zeros(phi.size(), cfg.gamma);

  SvoResult result;
  const auto record = [&](long iteration, double lr, double loss_estimate) {
    const ModelWeights w = mode_weights(phi);
    debug_check_against_circuit(train_set.samples.front().input, w.quantum,
                                model_cfg.hidden_response);
    TrainRecord row;
    row.iteration = iteration;
    row.lr = lr;
    row.loss_estimate = loss_estimate;
    row.train_accuracy = eval::model_accuracy(
        train_set, w, model_cfg, options.eval_k,
        derive_seed(cfg.seed, stream::kEvalTrain, iteration), options.threads);
    row.test_accuracy = eval::model_accuracy(
        test_set, w, model_cfg, options.eval_k,
        derive_seed(cfg.seed, stream::kEvalTest, iteration), options.threads);
    result.records.push_back(row);
  };

  if (cfg.iterations == 0) {
    SeededRng loss_rng(derive_seed(cfg.seed, stream::kInitialLoss, 0));
    const ModelWeights w0 = sample_weights(phi, loss_rng);
    const double estimate =
        batch_bound(train_set.samples, w0, model_cfg, train_set.size());
    record(0, cyclical_lr(0, cfg), estimate);
    result.phi = std::move(phi);
    return result;
  }

  const std::size_t effective_batch =
      std::min<std::size_t>(cfg.batch_size, train_set.size());
  std::vector<Sample> batch;
  batch.reserve(effective_batch);
  for (long i = 0; i < cfg.iterations; ++i) {
    const auto picks =
        rng.choose_without_replacement(train_set.size(), effective_batch);
    batch.clear();
    for (std::size_t idx : picks) batch.push_back(train_set.samples[idx]);

    const std::uint64_t step_seed = rng.next_u64();
    const StepMetrics metrics =
        svo_step(phi, baseline, batch, model_cfg, cfg, train_set.size(), i,
                 step_seed, options.threads);

    const long done = i + 1;
    if (done % options.record_every == 0 || done == cfg.iterations) {
      record(done, metrics.lr, metrics.mean_loss);
    }
  }
  result.phi = std::move(phi);
  return result;
}

}  // namespace qglm
