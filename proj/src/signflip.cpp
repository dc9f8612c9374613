#include "qglm/signflip.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qglm/eval.hpp"

namespace qglm {

void SignFlipConfig::validate() const {
  if (!(flip_fraction > 0.0 && flip_fraction <= 1.0)) {
    throw std::invalid_argument("flip fraction must lie in (0, 1]");
  }
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
}

int neuron_decision(const SignVector& x, const SignVector& w_m,
                    ResponseKind kind, double threshold,
                    bool linear_negative_slope) {
  const double p =
      response(kind, normalized_inner_product(x, w_m), linear_negative_slope);
  return p > threshold ? 1 : -1;
}

SignVector flip_update(const SignVector& w_m, const SignVector& x, int label,
                       int decision, const SignFlipConfig& cfg,
                       SeededRng& rng) {
  if (w_m.size() != x.size()) {
    throw std::invalid_argument("weight length " + std::to_string(w_m.size()) +
                                " does not match input length " +
                                std::to_string(x.size()));
  }
  if (decision == label) return w_m;

  // False positive moves w away from x (flip where signs coincide); false
  // negative moves it closer (flip where they differ).
  const bool want_matching = decision == 1 && label == -1;
  std::vector<std::size_t> eligible;
  for (std::size_t j = 0; j < w_m.size(); ++j) {
    if ((w_m[j] == x[j]) == want_matching) eligible.push_back(j);
  }
  if (eligible.empty()) return w_m;

  const auto count = std::min<std::size_t>(
      eligible.size(),
      static_cast<std::size_t>(
          std::ceil(cfg.flip_fraction * static_cast<double>(eligible.size()))));
  const auto picks = rng.choose_without_replacement(eligible.size(), count);
  std::vector<std::size_t> positions;
  positions.reserve(count);
  for (std::size_t p : picks) positions.push_back(eligible[p]);
  return w_m.with_flipped(positions);
}

int majority_predict(const SignVector& x, std::span<const SignVector> weights,
                     ResponseKind kind, double threshold,
                     bool linear_negative_slope) {
  if (weights.empty()) throw std::invalid_argument("empty ensemble");
  std::size_t positive = 0;
  for (const SignVector& w_m : weights) {
    if (neuron_decision(x, w_m, kind, threshold, linear_negative_slope) == 1) {
      ++positive;
    }
  }
  return 2 * positive >= weights.size() ? 1 : -1;
}

SignFlipResult train_signflip(const Dataset& train_set, const Dataset& test_set,
                              const ModelConfig& model_cfg,
                              const SignFlipConfig& cfg,
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
  SignFlipResult result;
  result.weights.reserve(model_cfg.hidden_count);
  for (std::size_t m = 0; m < model_cfg.hidden_count; ++m) {
    std::vector<Sign> row(model_cfg.input_size);
    for (std::size_t n = 0; n < model_cfg.input_size; ++n) {
      row[n] = static_cast<Sign>(sample_sign(0.5, rng));
    }
    result.weights.emplace_back(std::move(row));
  }

  const auto record = [&](long iteration) {
    debug_check_against_circuit(train_set.samples.front().input,
                                result.weights, model_cfg.hidden_response);
    TrainRecord row;
    row.iteration = iteration;
    row.lr = cfg.flip_fraction;
    row.train_accuracy = eval::ensemble_accuracy(
        train_set, result.weights, model_cfg.hidden_response, options.threads,
        cfg.threshold, model_cfg.linear_negative_slope);
    row.test_accuracy = eval::ensemble_accuracy(
        test_set, result.weights, model_cfg.hidden_response, options.threads,
        cfg.threshold, model_cfg.linear_negative_slope);
    row.loss_estimate = 1.0 - row.train_accuracy;
    result.records.push_back(row);
  };

  if (cfg.iterations == 0) {
    record(0);
    return result;
  }

  for (long i = 0; i < cfg.iterations; ++i) {
    const Sample& sample =
        train_set.samples[rng.uniform_index(train_set.size())];
    for (std::size_t m = 0; m < model_cfg.hidden_count; ++m) {
      const int decision = neuron_decision(
          sample.input, result.weights[m], model_cfg.hidden_response,
          cfg.threshold, model_cfg.linear_negative_slope);
      result.weights[m] = flip_update(result.weights[m], sample.input,
                                      sample.label, decision, cfg, rng);
    }
    const long done = i + 1;
    if (done % options.record_every == 0 || done == cfg.iterations) {
      record(done);
    }
  }
  return result;
}

}  // namespace qglm
