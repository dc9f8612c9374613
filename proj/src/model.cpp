#include "qglm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qglm/qsim.hpp"

namespace qglm {

namespace {

constexpr std::size_t kEnumerationLimit = 20;

void require_model_shapes(const ModelWeights& w, const ModelConfig& cfg) {
  w.validate();
  if (w.input_size() != cfg.input_size || w.hidden_count() != cfg.hidden_count) {
    throw std::invalid_argument(
        "weights shaped " + std::to_string(w.hidden_count()) + "x" +
        std::to_string(w.input_size()) + " do not match model " +
        std::to_string(cfg.hidden_count) + "x" + std::to_string(cfg.input_size));
  }
}

SignVector hidden_from_mask(std::size_t mask, std::size_t m) {
  std::vector<Sign> bits(m);
  for (std::size_t i = 0; i < m; ++i) {
    bits[i] = (mask >> i) & 1 ? Sign{1} : Sign{-1};
  }
  return SignVector(std::move(bits));
}

}  // namespace

void ModelConfig::validate() const {
  if (!is_power_of_two(input_size)) {
    throw std::invalid_argument("input size " + std::to_string(input_size) +
                                " must be a power of two");
  }
  if (hidden_count < 1) {
    throw std::invalid_argument("model needs at least one hidden neuron");
  }
}

double hidden_prob(const SignVector& x, const SignVector& w_m,
                   ResponseKind kind, bool linear_negative_slope) {
  return response(kind, normalized_inner_product(x, w_m),
                  linear_negative_slope);
}

double output_prob(const SignVector& y, const SignVector& w_c,
                   ResponseKind kind) {
  return response(kind, static_cast<double>(dot(w_c, y)));
}

std::vector<double> hidden_probabilities(const SignVector& x,
                                         const ModelWeights& w,
                                         const ModelConfig& cfg) {
  require_model_shapes(w, cfg);
  if (x.size() != cfg.input_size) {
    throw std::invalid_argument("input length " + std::to_string(x.size()) +
                                " does not match model input size " +
                                std::to_string(cfg.input_size));
  }
  std::vector<double> probs;
  probs.reserve(cfg.hidden_count);
  for (const SignVector& w_m : w.quantum) {
    probs.push_back(
        hidden_prob(x, w_m, cfg.hidden_response, cfg.linear_negative_slope));
  }
  return probs;
}

ForwardTrace forward(const SignVector& x, const ModelWeights& w,
                     const ModelConfig& cfg, SeededRng& rng) {
  ForwardTrace trace;
  trace.hidden_probs = hidden_probabilities(x, w, cfg);
  std::vector<Sign> hidden(cfg.hidden_count);
  for (std::size_t m = 0; m < cfg.hidden_count; ++m) {
    hidden[m] = static_cast<Sign>(sample_sign(trace.hidden_probs[m], rng));
  }
  trace.hidden = SignVector(std::move(hidden));
  trace.output_prob = output_prob(trace.hidden, w.classical, cfg.output_response);
  trace.output = sample_sign(trace.output_prob, rng);
  return trace;
}

double bce_loss(int label, double prob) {
  if (label != -1 && label != 1) {
    throw std::invalid_argument("label must be -1 or +1");
  }
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::invalid_argument("probability " + std::to_string(prob) +
                                " outside (0, 1)");
  }
  return -(0.5 * (1 + label) * std::log(prob) +
           0.5 * (1 - label) * std::log(1.0 - prob));
}

double loss_bound_estimate(const Sample& sample, const ModelWeights& w,
                           const ModelConfig& cfg, SeededRng& rng) {
  const std::vector<double> probs = hidden_probabilities(sample.input, w, cfg);
  std::vector<Sign> hidden(cfg.hidden_count);
  for (std::size_t m = 0; m < cfg.hidden_count; ++m) {
    hidden[m] = static_cast<Sign>(sample_sign(probs[m], rng));
  }
  const double p =
      output_prob(SignVector(std::move(hidden)), w.classical, cfg.output_response);
  return bce_loss(sample.label, p);
}

double loss_bound_exact(const Sample& sample, const ModelWeights& w,
                        const ModelConfig& cfg) {
  if (cfg.hidden_count > kEnumerationLimit) {
    throw std::invalid_argument("exact bound limited to " +
                                std::to_string(kEnumerationLimit) +
                                " hidden neurons");
  }
  const std::vector<double> probs = hidden_probabilities(sample.input, w, cfg);
  double acc = 0.0;
  const std::size_t combos = std::size_t{1} << cfg.hidden_count;
  for (std::size_t mask = 0; mask < combos; ++mask) {
    double weight = 1.0;
    for (std::size_t m = 0; m < cfg.hidden_count; ++m) {
      weight *= ((mask >> m) & 1) ? probs[m] : 1.0 - probs[m];
    }
    const SignVector hidden = hidden_from_mask(mask, cfg.hidden_count);
    acc += weight * bce_loss(sample.label,
                             output_prob(hidden, w.classical, cfg.output_response));
  }
  return acc;
}

double loss_bound_analytic(const Sample& sample, const ModelWeights& w,
                           const ModelConfig& cfg) {
  const std::vector<double> probs = hidden_probabilities(sample.input, w, cfg);
  const std::size_t m = cfg.hidden_count;
  // P(w_c,m * y_m = +1) per term, then convolve the counts of +1 terms.
  std::vector<double> plus(m);
  for (std::size_t i = 0; i < m; ++i) {
    plus[i] = w.classical[i] == 1 ? probs[i] : 1.0 - probs[i];
  }
  std::vector<double> count_prob(m + 1, 0.0);
  count_prob[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j > 0; --j) {
      count_prob[j] = count_prob[j] * (1.0 - plus[i]) +
                      count_prob[j - 1] * plus[i];
    }
    count_prob[0] *= 1.0 - plus[i];
  }
  double acc = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double dot_value = 2.0 * static_cast<double>(j) -
                             static_cast<double>(m);
    acc += count_prob[j] *
           bce_loss(sample.label, response(cfg.output_response, dot_value));
  }
  return acc;
}

double marginal_loss_exact(const Sample& sample, const ModelWeights& w,
                           const ModelConfig& cfg) {
  if (cfg.hidden_count > kEnumerationLimit) {
    throw std::invalid_argument("exact marginal limited to " +
                                std::to_string(kEnumerationLimit) +
                                " hidden neurons");
  }
  const std::vector<double> probs = hidden_probabilities(sample.input, w, cfg);
  double acc = 0.0;
  const std::size_t combos = std::size_t{1} << cfg.hidden_count;
  for (std::size_t mask = 0; mask < combos; ++mask) {
    double weight = 1.0;
    for (std::size_t m = 0; m < cfg.hidden_count; ++m) {
      weight *= ((mask >> m) & 1) ? probs[m] : 1.0 - probs[m];
    }
    const SignVector hidden = hidden_from_mask(mask, cfg.hidden_count);
    const double p = output_prob(hidden, w.classical, cfg.output_response);
    acc += weight * (sample.label == 1 ? p : 1.0 - p);
  }
  return -std::log(acc);
}

void debug_check_against_circuit(
    [[maybe_unused]] const SignVector& x,
    [[maybe_unused]] std::span<const SignVector> hidden_weights,
    [[maybe_unused]] ResponseKind kind) {
#ifndef NDEBUG
  if (kind != ResponseKind::Quadratic) return;
  for (const SignVector& w_m : hidden_weights) {
    const double circuit = ancilla_probability(x, w_m);
    const double model_prob = hidden_prob(x, w_m, kind);
    // the response clamps exact 0 and 1, the circuit does not
    if (std::abs(model_prob - circuit) > kProbEpsilon + 1e-12) {
      throw std::logic_error("quadratic response disagrees with the circuit");
    }
  }
#endif
}

int predict(const SignVector& x, const ModelWeights& w, const ModelConfig& cfg,
            SeededRng& rng, int k) {
  if (k < 1) throw std::invalid_argument("prediction needs k >= 1");
  const std::vector<double> probs = hidden_probabilities(x, w, cfg);
  double sum = 0.0;
  std::vector<Sign> hidden(cfg.hidden_count);
  for (int draw = 0; draw < k; ++draw) {
    for (std::size_t m = 0; m < cfg.hidden_count; ++m) {
      hidden[m] = static_cast<Sign>(sample_sign(probs[m], rng));
    }
    sum += output_prob(SignVector(hidden), w.classical, cfg.output_response);
  }
  return sum / k >= 0.5 ? 1 : -1;
}

}  // namespace qglm
