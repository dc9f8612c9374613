#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qglm/core.hpp"
#include "qglm/model.hpp"

namespace qglm {

// Perceptron-like benchmark: each hidden neuron is trained on its own by
// flipping a fixed fraction of eligible weight signs on mistakes, and the
// ensemble classifies by majority vote.
struct SignFlipConfig {
  double flip_fraction = 0.625;
  long iterations = 4000;
  double threshold = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SignFlipResult {
  std::vector<SignVector> weights;  // one vector per neuron
  std::vector<TrainRecord> records;
};

// Deterministic per-neuron decision: +1 iff the exact response value
// exceeds the threshold.
int neuron_decision(const SignVector& x, const SignVector& w_m,
                    ResponseKind kind, double threshold = 0.5,
                    bool linear_negative_slope = false);

// Mistake-driven update. False positive: flip ceil(fraction * |A|) positions
// drawn without replacement from A = {j : w_j == x_j}; false negative: same
// with A = {j : w_j != x_j}. Correct decisions and empty A leave w unchanged.
SignVector flip_update(const SignVector& w_m, const SignVector& x, int label,
                       int decision, const SignFlipConfig& cfg, SeededRng& rng);

// +1 iff at least half of the neurons decide +1.
int majority_predict(const SignVector& x, std::span<const SignVector> weights,
                     ResponseKind kind, double threshold = 0.5,
                     bool linear_negative_slope = false);

// Trains all neurons independently, one uniformly drawn sample per
// iteration. Records use majority_predict; the loss_estimate column carries
// the training error rate and the lr column the flip fraction.
SignFlipResult train_signflip(const Dataset& train_set, const Dataset& test_set,
                              const ModelConfig& model_cfg,
                              const SignFlipConfig& cfg,
                              const TrainOptions& options = {});

}  // namespace qglm
