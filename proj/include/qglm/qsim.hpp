#pragma once

#include <cstddef>
#include <vector>

#include "qglm/core.hpp"

namespace qglm {

// Real amplitude vector of a pure state; length is a power of two and the
// Euclidean norm is 1 (within 1e-12).
struct StateVector {
  std::vector<double> amplitudes;

  std::size_t size() const { return amplitudes.size(); }
  double norm() const;
};

// Orthogonal matrix whose last row is w / sqrt(N), so that applying it to
// the amplitude encoding of w yields the last basis state.
class WeightUnitary {
 public:
  WeightUnitary(std::size_t n, std::vector<double> row_major);

  std::size_t size() const { return n_; }
  double at(std::size_t row, std::size_t col) const {
    return matrix_[row * n_ + col];
  }

  StateVector apply(const StateVector& state) const;

  // Max |U U^T - I| entry, for orthonormality checks.
  double orthonormality_defect() const;

 private:
  std::size_t n_;
  std::vector<double> matrix_;
};

bool is_power_of_two(std::size_t n);

// amplitudes[i] = x_i / sqrt(N). Requires a power-of-two length.
StateVector encode_amplitude(const SignVector& x);

// Orthonormal completion of w / sqrt(N) (deterministic Gram-Schmidt over the
// standard basis, dependent vectors skipped), placed so w / sqrt(N) is the
// last row.
WeightUnitary build_weight_unitary(const SignVector& w);

// Runs the measurement circuit: encodes x, applies the weight unitary,
// attaches an ancilla in |0>, flips the ancilla on the last basis index and
// returns the probability of reading the ancilla as 1. Equals the squared
// normalized inner product of x and w.
double ancilla_probability(const SignVector& x, const SignVector& w);

// One measurement outcome mapped to {-1, +1}.
int sample_measurement(double p, SeededRng& rng);

}  // namespace qglm
