#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qglm/core.hpp"
#include "qglm/response.hpp"

namespace qglm {

// Two-layer classifier: M stochastic binary hidden neurons driven by a
// response function of the normalized inner product, combined by one
// sigmoid output neuron over the raw hidden dot product.
struct ModelConfig {
  std::size_t input_size = 16;   // N, must be a power of two
  std::size_t hidden_count = 32; // M
  ResponseKind hidden_response = ResponseKind::Quadratic;
  ResponseKind output_response = ResponseKind::Sigmoid;
  bool linear_negative_slope = false;

  void validate() const;
};

struct ForwardTrace {
  SignVector hidden;                 // sampled hidden activations, length M
  std::vector<double> hidden_probs;  // p(y_m = +1 | x)
  double output_prob = 0.0;          // p(z = +1 | y)
  int output = 0;                    // sampled decision
};

// p(y_m = +1 | x) for one hidden neuron.
double hidden_prob(const SignVector& x, const SignVector& w_m,
                   ResponseKind kind, bool linear_negative_slope = false);

// p(z = +1 | y): response of the raw (unnormalized) dot product.
double output_prob(const SignVector& y, const SignVector& w_c,
                   ResponseKind kind = ResponseKind::Sigmoid);

// All M hidden probabilities for one input.
std::vector<double> hidden_probabilities(const SignVector& x,
                                         const ModelWeights& w,
                                         const ModelConfig& cfg);

// Samples the full stochastic pass. Hidden neurons consume one draw each in
// index order, then one draw for the output; M+1 draws total.
ForwardTrace forward(const SignVector& x, const ModelWeights& w,
                     const ModelConfig& cfg, SeededRng& rng);

// l(a, b) = -[(1+a)/2 ln b + (1-a)/2 ln(1-b)]; b must lie in (0, 1).
double bce_loss(int label, double prob);

// Single-draw unbiased estimate of the expected log-loss bound: samples one
// hidden vector (M draws) and scores the output probability it induces.
double loss_bound_estimate(const Sample& sample, const ModelWeights& w,
                           const ModelConfig& cfg, SeededRng& rng);

// Expected log-loss bound, exact by enumeration over all 2^M hidden vectors.
// Requires M <= 20.
double loss_bound_exact(const Sample& sample, const ModelWeights& w,
                        const ModelConfig& cfg);

// Same expectation in closed form: the output probability depends on y only
// through the dot product, whose distribution is a sum of independent signs
// and follows from an O(M^2) convolution. Agrees with loss_bound_exact to
// machine precision and has no size limit.
double loss_bound_analytic(const Sample& sample, const ModelWeights& w,
                           const ModelConfig& cfg);

// Exact marginal log-loss -ln p(z = label | x); never exceeds
// loss_bound_exact. Requires M <= 20.
double marginal_loss_exact(const Sample& sample, const ModelWeights& w,
                           const ModelConfig& cfg);

// Averages the output probability over k sampled hidden vectors (k*M draws)
// and thresholds at 1/2, ties toward +1.
int predict(const SignVector& x, const ModelWeights& w, const ModelConfig& cfg,
            SeededRng& rng, int k);

// Debug-build assertion that the quadratic response agrees with the
// measurement circuit for every hidden neuron on one input; no-op in
// release builds and for other response kinds. The trainers call this at
// every metrics record.
void debug_check_against_circuit(const SignVector& x,
                                 std::span<const SignVector> hidden_weights,
                                 ResponseKind kind);

}  // namespace qglm
