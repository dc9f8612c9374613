#pragma once

#include <string_view>

namespace qglm {

// Activation probabilities are kept inside [kProbEpsilon, 1 - kProbEpsilon]
// so log-losses stay finite (the quadratic response is exactly 0 on
// orthogonal vectors).
inline constexpr double kProbEpsilon = 1e-6;

// The four circuit-realizable activations plus the classical sigmoid.
enum class ResponseKind {
  Quadratic,                // |ip|^2
  BiasedQuadratic,          // 1/2 + 1/2 |ip|^2
  BiasedCenteredQuadratic,  // 1/2 + 1/2 |ip - 1/2|^2
  Linear,                   // 1/2 + 1/2 ip
  Sigmoid,                  // 1 / (1 + exp(-ip)), any real ip
};

// Short names used in CLI flags and config files:
// "q", "bq", "bcq", "l", "sigmoid".
ResponseKind parse_response_kind(std::string_view name);
std::string_view response_kind_name(ResponseKind kind);

double sigmoid(double a);

// Maps an inner product to an activation probability, clamped into
// [kProbEpsilon, 1 - kProbEpsilon]. The first four kinds require
// ip in [-1, 1] (a normalized inner product); Sigmoid accepts any real.
// linear_negative_slope switches Linear to 1/2 - 1/2 ip (off by default).
double response(ResponseKind kind, double ip,
                bool linear_negative_slope = false);

}  // namespace qglm
