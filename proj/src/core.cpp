#include "qglm/core.hpp"

#include <string>

namespace qglm {

namespace {

void check_sign(int v, const char* what) {
  if (v != -1 && v != 1) {
    throw std::invalid_argument(std::string(what) + " must be -1 or +1, got " +
                                std::to_string(v));
  }
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

SignVector::SignVector(std::vector<Sign> values) : values_(std::move(values)) {
  for (Sign v : values_) check_sign(v, "sign entry");
}

SignVector::SignVector(std::initializer_list<int> values) {
  values_.reserve(values.size());
  for (int v : values) {
    check_sign(v, "sign entry");
    values_.push_back(static_cast<Sign>(v));
  }
}

SignVector SignVector::filled(std::size_t n, int sign) {
  check_sign(sign, "fill value");
  SignVector out;
  out.values_.assign(n, static_cast<Sign>(sign));
  return out;
}

SignVector SignVector::negated() const {
  SignVector out;
  out.values_.reserve(values_.size());
  for (Sign v : values_) out.values_.push_back(static_cast<Sign>(-v));
  return out;
}

SignVector SignVector::with_flipped(
    const std::vector<std::size_t>& positions) const {
  SignVector out = *this;
  for (std::size_t p : positions) {
    if (p >= out.values_.size()) {
      throw std::out_of_range("flip position " + std::to_string(p) +
                              " out of range for length " +
                              std::to_string(out.values_.size()));
    }
    out.values_[p] = static_cast<Sign>(-out.values_[p]);
  }
  return out;
}

void ModelWeights::validate() const {
  if (quantum.empty()) {
    throw std::invalid_argument("model needs at least one hidden weight vector");
  }
  const std::size_t n = quantum.front().size();
  for (const SignVector& w : quantum) {
    if (w.size() != n) {
      throw std::invalid_argument("hidden weight vectors must share one length");
    }
  }
  if (classical.size() != quantum.size()) {
    throw std::invalid_argument(
        "classical weight length " + std::to_string(classical.size()) +
        " must equal hidden neuron count " + std::to_string(quantum.size()));
  }
}

void Dataset::validate() const {
  for (const Sample& s : samples) {
    if (s.input.size() != input_size) {
      throw std::invalid_argument("dataset sample length " +
                                  std::to_string(s.input.size()) +
                                  " does not match declared input size " +
                                  std::to_string(input_size));
    }
    check_sign(s.label, "label");
  }
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64_next(sm);
}

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index needs n > 0");
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

std::vector<std::size_t> SeededRng::choose_without_replacement(std::size_t n,
                                                               std::size_t k) {
  if (k > n) {
    throw std::invalid_argument("cannot choose " + std::to_string(k) +
                                " distinct items from " + std::to_string(n));
  }
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t s = base;
  splitmix64_next(s);
  s ^= a;
  splitmix64_next(s);
  s ^= b;
  splitmix64_next(s);
  s ^= c;
  return splitmix64_next(s);
}

int dot(const SignVector& a, const SignVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot length mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
  int acc = 0;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    acc += static_cast<int>(av[i]) * static_cast<int>(bv[i]);
  }
  return acc;
}

double normalized_inner_product(const SignVector& a, const SignVector& b) {
  if (a.size() == 0) throw std::invalid_argument("empty vectors have no overlap");
  return static_cast<double>(dot(a, b)) / static_cast<double>(a.size());
}

int sample_sign(double p, SeededRng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability " + std::to_string(p) +
                                " outside [0, 1]");
  }
  return rng.uniform() < p ? 1 : -1;
}

}  // namespace qglm
