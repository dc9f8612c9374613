#pragma once

#include <cstdint>
#include <span>

#include "qglm/core.hpp"
#include "qglm/model.hpp"

namespace qglm::eval {

// Accuracy kernels. The OpenMP versions give each sample its own child
// stream of eval_seed, so serial and parallel runs produce identical
// results; the serial versions are the reference the tests compare against.

double model_accuracy_serial(const Dataset& data, const ModelWeights& w,
                             const ModelConfig& cfg, int k,
                             std::uint64_t eval_seed);

double model_accuracy(const Dataset& data, const ModelWeights& w,
                      const ModelConfig& cfg, int k, std::uint64_t eval_seed,
                      int threads);

// Majority vote over per-neuron threshold decisions; fully deterministic.
double ensemble_accuracy_serial(const Dataset& data,
                                std::span<const SignVector> weights,
                                ResponseKind kind, double threshold = 0.5,
                                bool linear_negative_slope = false);

double ensemble_accuracy(const Dataset& data,
                         std::span<const SignVector> weights,
                         ResponseKind kind, int threads,
                         double threshold = 0.5,
                         bool linear_negative_slope = false);

}  // namespace qglm::eval
