#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qglm/core.hpp"
#include "qglm/model.hpp"

namespace qglm {

// Natural parameters of the product-Bernoulli search distribution over all
// binary weights: sigmoid(value) is the probability the weight equals +1.
// Layout is hidden weights row-major (m*N + n) followed by the M classical
// entries; this is also the sampling draw order.
struct VariationalParams {
  std::size_t hidden_count = 0;  // M
  std::size_t input_size = 0;    // N
  std::vector<double> values;    // M*N + M entries

  static VariationalParams zeros(std::size_t hidden_count,
                                 std::size_t input_size);

  std::size_t size() const { return values.size(); }
  double quantum(std::size_t m, std::size_t n) const {
    return values[m * input_size + n];
  }
  double& quantum(std::size_t m, std::size_t n) {
    return values[m * input_size + n];
  }
  double classical(std::size_t m) const {
    return values[hidden_count * input_size + m];
  }
  double& classical(std::size_t m) {
    return values[hidden_count * input_size + m];
  }
};

// Per-parameter moving averages backing the adaptive baseline
// b_i = avg[loss * grad_i^2] / avg[grad_i^2]; both averages decay with
// factor gamma and the denominator is guarded by 1e-12.
struct BaselineState {
  std::vector<double> numerator_avg;
  std::vector<double> denominator_avg;
  double gamma = 0.9;

  static BaselineState zeros(std::size_t size, double gamma);

  double baseline(std::size_t i) const {
    return numerator_avg[i] / (denominator_avg[i] + 1e-12);
  }
};

struct SvoConfig {
  int weight_samples = 10;  // T, population size per update
  int batch_size = 16;
  long iterations = 4000;
  double eta_base = 0.1;
  double eta_max = 0.9;
  long step_size = 1000;  // s, half-cycle length of the lr schedule
  double gamma = 0.9;     // baseline moving-average decay
  double phi_init_scale = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct StepMetrics {
  double mean_loss = 0.0;
  double grad_norm = 0.0;
  double lr = 0.0;
};

struct SvoResult {
  VariationalParams phi;
  std::vector<TrainRecord> records;
};

// One weight configuration drawn from the search distribution; one draw per
// parameter, in flat layout order.
ModelWeights sample_weights(const VariationalParams& phi, SeededRng& rng);

// Per-parameter score (1+w)/2 - sigmoid(phi), in flat layout order.
std::vector<double> log_q_gradient(const VariationalParams& phi,
                                   const ModelWeights& w);

// (dataset_size / batch size) * sum of single-draw loss estimates.
double batch_loss(std::span<const Sample> batch, const ModelWeights& w,
                  const ModelConfig& cfg, std::size_t dataset_size,
                  SeededRng& rng);

// Same scaling over the closed-form per-sample bounds; deterministic given
// the weights. This is the loss signal the optimizer feeds to the score
// estimator: sampling the hidden layer there as well would add enough
// variance to stall the biased response kinds within the iteration budget.
double batch_bound(std::span<const Sample> batch, const ModelWeights& w,
                   const ModelConfig& cfg, std::size_t dataset_size);

void update_baseline(BaselineState& state, double loss,
                     std::span<const double> grad);

// Triangular cyclical schedule: cycle c = floor(1 + i/(2s)),
// t = |i/s - 2c + 1|, raw = eta_base + (eta_max - eta_base) * max(0, 1-t)
// * (1 + sin(c*pi/2)), clamped into [eta_base, eta_max].
double cyclical_lr(long iteration, const SvoConfig& cfg);

// Per-parameter descent direction mean_t[(loss_t - b_i) * grad_t,i]. With a
// zeroed baseline this is the plain score-function gradient estimate of the
// expected loss.
std::vector<double> reinforce_update(std::span<const double> losses,
                                     std::span<const std::vector<double>> grads,
                                     const BaselineState& baseline);

// One descent step on the expected loss bound: draws T weight samples from
// independent child streams of step_seed, scores each on the batch, feeds
// the baseline, then applies phi -= lr * mean_t (loss_t - b) * grad_t.
StepMetrics svo_step(VariationalParams& phi, BaselineState& baseline,
                     std::span<const Sample> batch, const ModelConfig& model_cfg,
                     const SvoConfig& cfg, std::size_t dataset_size,
                     long iteration, std::uint64_t step_seed, int threads = 1);

// Most probable weights under the search distribution: sign(phi), ties +1.
ModelWeights mode_weights(const VariationalParams& phi);

// Full training loop over uniformly drawn mini-batches; metrics rows are
// recorded every record_every iterations (and at the final iteration) using
// the mode weights. Deterministic given the config seed.
SvoResult train(const Dataset& train_set, const Dataset& test_set,
                const ModelConfig& model_cfg, const SvoConfig& cfg,
                const TrainOptions& options = {});

}  // namespace qglm
