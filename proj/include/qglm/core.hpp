#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qglm {

// Inputs, hidden activations and weights are all vectors over {-1, +1}.
using Sign = std::int8_t;

class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<Sign> values);
  SignVector(std::initializer_list<int> values);

  static SignVector filled(std::size_t n, int sign);

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Sign>& values() const { return values_; }

  SignVector negated() const;
  // Copy with the given positions sign-flipped. Positions must be in range.
  SignVector with_flipped(const std::vector<std::size_t>& positions) const;

  bool operator==(const SignVector&) const = default;

 private:
  std::vector<Sign> values_;
};

// M hidden weight vectors of length N plus one combining vector of length M.
struct ModelWeights {
  std::vector<SignVector> quantum;
  SignVector classical;

  std::size_t hidden_count() const { return quantum.size(); }
  std::size_t input_size() const {
    return quantum.empty() ? 0 : quantum.front().size();
  }
  void validate() const;
};

struct Sample {
  SignVector input;
  Sign label = 1;  // -1 or +1
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t input_size = 0;

  std::size_t size() const { return samples.size(); }
  void validate() const;
};

// Deterministic xoshiro256** generator seeded through splitmix64.
// Equal seeds give equal draw streams; consumers document how many draws
// they take so traces stay reproducible.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();

  // Uniform double in [0, 1). One draw.
  double uniform();

  // Uniform integer in [0, n). One draw.
  std::size_t uniform_index(std::size_t n);

  // k distinct indices from [0, n), in selection order. k draws.
  std::vector<std::size_t> choose_without_replacement(std::size_t n,
                                                      std::size_t k);

  // Fisher-Yates. size()-1 draws.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Child-stream seed for parallel work (per-trial, per-sample, per-draw
// streams). Mixing is fixed so results never depend on thread count.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// Stream tags used when deriving child seeds.
namespace stream {
inline constexpr std::uint64_t kEvalTrain = 1;
inline constexpr std::uint64_t kEvalTest = 2;
inline constexpr std::uint64_t kInitialLoss = 3;
inline constexpr std::uint64_t kWeightSample = 4;
}  // namespace stream

// Sum of elementwise products, an integer in [-N, N] with the parity of N.
int dot(const SignVector& a, const SignVector& b);

// dot(a, b) / N, always in [-1, 1].
double normalized_inner_product(const SignVector& a, const SignVector& b);

// +1 with probability p, -1 otherwise. Exactly one uniform draw.
int sample_sign(double p, SeededRng& rng);

// One metrics row of a training run.
struct TrainRecord {
  int trial = 0;
  long iteration = 0;
  double lr = 0.0;
  double loss_estimate = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Shared knobs for recording metrics during training.
struct TrainOptions {
  int record_every = 10;
  int eval_k = 100;  // forward passes per prediction when measuring accuracy
  int threads = 1;
};

}  // namespace qglm
