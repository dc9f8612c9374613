#include "qglm/response.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qglm {

ResponseKind parse_response_kind(std::string_view name) {
  if (name == "q") return ResponseKind::Quadratic;
  if (name == "bq") return ResponseKind::BiasedQuadratic;
  if (name == "bcq") return ResponseKind::BiasedCenteredQuadratic;
  if (name == "l") return ResponseKind::Linear;
  if (name == "sigmoid") return ResponseKind::Sigmoid;
  throw std::invalid_argument("unknown response kind '" + std::string(name) +
                              "' (expected q, bq, bcq, l or sigmoid)");
}

std::string_view response_kind_name(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Quadratic: return "q";
    case ResponseKind::BiasedQuadratic: return "bq";
    case ResponseKind::BiasedCenteredQuadratic: return "bcq";
    case ResponseKind::Linear: return "l";
    case ResponseKind::Sigmoid: return "sigmoid";
  }
  throw std::logic_error("unhandled response kind");
}

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

double response(ResponseKind kind, double ip, bool linear_negative_slope) {
  double g = 0.0;
  switch (kind) {
    case ResponseKind::Sigmoid:
      g = sigmoid(ip);
      break;
    case ResponseKind::Quadratic:
    case ResponseKind::BiasedQuadratic:
    case ResponseKind::BiasedCenteredQuadratic:
    case ResponseKind::Linear: {
      if (std::abs(ip) > 1.0 + 1e-12) {
        throw std::domain_error("inner product " + std::to_string(ip) +
                                " outside [-1, 1]");
      }
      switch (kind) {
        case ResponseKind::Quadratic:
          g = ip * ip;
          break;
        case ResponseKind::BiasedQuadratic:
          g = 0.5 + 0.5 * ip * ip;
          break;
        case ResponseKind::BiasedCenteredQuadratic:
          // Can exceed 1 for ip < -1/2 + ... ; the clamp below caps it.
          g = 0.5 + 0.5 * (ip - 0.5) * (ip - 0.5);
          break;
        case ResponseKind::Linear:
          g = linear_negative_slope ? 0.5 - 0.5 * ip : 0.5 + 0.5 * ip;
          break;
        default:
          break;
      }
      break;
    }
  }
  return std::clamp(g, kProbEpsilon, 1.0 - kProbEpsilon);
}

}  // namespace qglm
