#include "qglm/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qglm {

namespace {

void require_power_of_two(std::size_t n, const char* what) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument(std::string(what) + " length " +
                                std::to_string(n) +
                                " is not a power of two");
  }
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

double StateVector::norm() const {
  return std::sqrt(inner(amplitudes, amplitudes));
}

WeightUnitary::WeightUnitary(std::size_t n, std::vector<double> row_major)
    : n_(n), matrix_(std::move(row_major)) {
  if (matrix_.size() != n_ * n_) {
    throw std::invalid_argument("weight unitary storage size mismatch");
  }
}

StateVector WeightUnitary::apply(const StateVector& state) const {
  if (state.size() != n_) {
    throw std::invalid_argument("state length " + std::to_string(state.size()) +
                                " does not match unitary size " +
                                std::to_string(n_));
  }
  StateVector out;
  out.amplitudes.assign(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n_; ++c) {
      acc += matrix_[r * n_ + c] * state.amplitudes[c];
    }
    out.amplitudes[r] = acc;
  }
  return out;
}

double WeightUnitary::orthonormality_defect() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        acc += matrix_[r * n_ + k] * matrix_[c * n_ + k];
      }
      const double target = (r == c) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(acc - target));
    }
  }
  return worst;
}

StateVector encode_amplitude(const SignVector& x) {
  require_power_of_two(x.size(), "input");
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  StateVector state;
  state.amplitudes.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    state.amplitudes.push_back(x[i] * scale);
  }
  return state;
}

WeightUnitary build_weight_unitary(const SignVector& w) {
  require_power_of_two(w.size(), "weight");
  const std::size_t n = w.size();

  // Gram-Schmidt over [w/sqrt(N), e_0, e_1, ...]; exactly one standard basis
  // vector ends up dependent and gets skipped. A second orthogonalization
  // pass keeps the defect near machine precision.
  std::vector<std::vector<double>> rows;
  rows.push_back(encode_amplitude(w).amplitudes);
  for (std::size_t j = 0; j < n && rows.size() < n; ++j) {
    std::vector<double> v(n, 0.0);
    v[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& r : rows) {
        const double coeff = inner(v, r);
        for (std::size_t i = 0; i < n; ++i) v[i] -= coeff * r[i];
      }
    }
    const double nrm = std::sqrt(inner(v, v));
    if (nrm < 1e-8) continue;
    for (double& entry : v) entry /= nrm;
    rows.push_back(std::move(v));
  }
  if (rows.size() != n) {
    throw std::logic_error("orthonormal completion failed");
  }

  std::vector<double> matrix(n * n, 0.0);
  // Completed rows first, the weight row last.
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) matrix[(r - 1) * n + c] = rows[r][c];
  }
  for (std::size_t c = 0; c < n; ++c) matrix[(n - 1) * n + c] = rows[0][c];
  return WeightUnitary(n, std::move(matrix));
}

double ancilla_probability(const SignVector& x, const SignVector& w) {
  if (x.size() != w.size()) {
    throw std::invalid_argument("input length " + std::to_string(x.size()) +
                                " does not match weight length " +
                                std::to_string(w.size()));
  }
  const std::size_t n = x.size();
  const StateVector evolved = build_weight_unitary(w).apply(encode_amplitude(x));

  // Register extended by one ancilla qubit in |0>; amplitude layout is
  // [basis index][ancilla bit].
  std::vector<double> joint(2 * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) joint[2 * j] = evolved.amplitudes[j];

  // Multi-controlled NOT: the ancilla flips exactly on the last basis index.
  std::swap(joint[2 * (n - 1)], joint[2 * (n - 1) + 1]);

  double p = 0.0;
  for (std::size_t j = 0; j < n; ++j) p += joint[2 * j + 1] * joint[2 * j + 1];
  return p;
}

int sample_measurement(double p, SeededRng& rng) { return sample_sign(p, rng); }

}  // namespace qglm
