#include "qglm/eval.hpp"

#include <algorithm>

#include "qglm/signflip.hpp"

namespace qglm::eval {

double model_accuracy_serial(const Dataset& data, const ModelWeights& w,
                             const ModelConfig& cfg, int k,
                             std::uint64_t eval_seed) {
  long correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    SeededRng rng(derive_seed(eval_seed, i));
    const Sample& s = data.samples[i];
    correct += predict(s.input, w, cfg, rng, k) == s.label;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double model_accuracy(const Dataset& data, const ModelWeights& w,
                      const ModelConfig& cfg, int k, std::uint64_t eval_seed,
                      int threads) {
  const long n = static_cast<long>(data.size());
  long correct = 0;
#pragma omp parallel for schedule(static) reduction(+ : correct) \
    num_threads(std::max(threads, 1))
  for (long i = 0; i < n; ++i) {
    SeededRng rng(derive_seed(eval_seed, static_cast<std::uint64_t>(i)));
    const Sample& s = data.samples[static_cast<std::size_t>(i)];
    correct += predict(s.input, w, cfg, rng, k) == s.label;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

double ensemble_accuracy_serial(const Dataset& data,
                                std::span<const SignVector> weights,
                                ResponseKind kind, double threshold,
                                bool linear_negative_slope) {
  long correct = 0;
  for (const Sample& s : data.samples) {
    correct += majority_predict(s.input, weights, kind, threshold,
                                linear_negative_slope) == s.label;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double ensemble_accuracy(const Dataset& data,
                         std::span<const SignVector> weights,
                         ResponseKind kind, int threads, double threshold,
                         bool linear_negative_slope) {
  const long n = static_cast<long>(data.size());
  long correct = 0;
#pragma omp parallel for schedule(static) reduction(+ : correct) \
    num_threads(std::max(threads, 1))
  for (long i = 0; i < n; ++i) {
    const Sample& s = data.samples[static_cast<std::size_t>(i)];
    correct += majority_predict(s.input, weights, kind, threshold,
                                linear_negative_slope) == s.label;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace qglm::eval
