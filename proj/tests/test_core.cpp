#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "qglm/core.hpp"

using namespace qglm;

TEST_SUITE_BEGIN("core");

TEST_CASE("sign vectors reject entries outside {-1,+1}") {
  CHECK_THROWS_AS(SignVector({1, 0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(SignVector({2}), std::invalid_argument);
  const SignVector v{1, -1, 1};
  CHECK(v.size() == 3);
  CHECK(v[1] == -1);
  CHECK(v.negated() == SignVector{-1, 1, -1});
  CHECK(v.with_flipped({0, 2}) == SignVector{-1, -1, -1});
  CHECK_THROWS_AS(v.with_flipped({3}), std::out_of_range);
}

TEST_CASE("dot on plain examples") {
  CHECK(dot({1, 1, 1, 1}, {1, 1, 1, 1}) == 4);
  CHECK(dot({1, 1, -1, -1}, {1, -1, 1, -1}) == 0);
  CHECK(dot({1, 1, 1, 1}, {1, 1, 1, -1}) == 2);
  CHECK_THROWS_AS(dot({1, 1}, {1, 1, 1}), std::invalid_argument);
}

TEST_CASE("dot is symmetric and bounded with the parity of N") {
  SeededRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(12);
    std::vector<Sign> av(n), bv(n);
    for (std::size_t i = 0; i < n; ++i) {
      av[i] = static_cast<Sign>(sample_sign(0.5, rng));
      bv[i] = static_cast<Sign>(sample_sign(0.5, rng));
    }
    const SignVector a(av), b(bv);
    const int d = dot(a, b);
    CHECK(d == dot(b, a));
    CHECK(std::abs(d) <= static_cast<int>(n));
    CHECK((d - static_cast<int>(n)) % 2 == 0);
  }
}

TEST_CASE("normalized inner product on plain examples") {
  CHECK(normalized_inner_product({1, -1, 1, -1}, {1, -1, 1, -1}) == 1.0);
  CHECK(normalized_inner_product({1, 1, -1, -1}, {1, -1, 1, -1}) == 0.0);
  CHECK(normalized_inner_product({1, 1, 1, 1}, {1, 1, 1, -1}) == 0.5);
}

TEST_CASE("normalized inner product stays in [-1,1] for all pairs at N=4") {
  for (std::uint32_t a = 0; a < 16; ++a) {
    std::vector<Sign> av(4);
    for (int j = 0; j < 4; ++j) av[j] = (a >> j) & 1 ? Sign{1} : Sign{-1};
    for (std::uint32_t b = 0; b < 16; ++b) {
      std::vector<Sign> bv(4);
      for (int j = 0; j < 4; ++j) bv[j] = (b >> j) & 1 ? Sign{1} : Sign{-1};
      const double ip = normalized_inner_product(SignVector(av), SignVector(bv));
      CHECK(std::abs(ip) <= 1.0);
    }
  }
}

TEST_CASE("sample_sign respects degenerate probabilities") {
  SeededRng rng(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_sign(1.0, rng) == 1);
    CHECK(sample_sign(0.0, rng) == -1);
  }
  CHECK_THROWS_AS(sample_sign(-0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_sign(1.1, rng), std::invalid_argument);
}

TEST_CASE("sample_sign hits the requested frequency") {
  SeededRng rng(11);
  long positives = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) positives += sample_sign(0.5, rng) == 1;
  CHECK(std::abs(positives / static_cast<double>(draws) - 0.5) < 0.01);
}

TEST_CASE("equal seeds give equal streams") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  SeededRng c(42), d(43);
  bool all_equal = true;
  for (int i = 0; i < 16; ++i) all_equal &= c.next_u64() == d.next_u64();
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform draws live in [0,1)") {
  SeededRng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("choose_without_replacement returns distinct in-range indices") {
  SeededRng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(30);
    const std::size_t k = rng.uniform_index(n + 1);
    const auto picks = rng.choose_without_replacement(n, k);
    CHECK(picks.size() == k);
    std::set<std::size_t> distinct(picks.begin(), picks.end());
    CHECK(distinct.size() == k);
    for (std::size_t p : picks) CHECK(p < n);
  }
  CHECK_THROWS_AS(rng.choose_without_replacement(3, 4), std::invalid_argument);
}

TEST_CASE("derive_seed separates streams") {
  const std::uint64_t base = 77;
  CHECK(derive_seed(base, 1) == derive_seed(base, 1));
  CHECK(derive_seed(base, 1) != derive_seed(base, 2));
  CHECK(derive_seed(base, 1, 2) != derive_seed(base, 2, 1));
  CHECK(derive_seed(base, 1) != derive_seed(base + 1, 1));
}

TEST_CASE("dataset validation flags shape and label problems") {
  Dataset ds;
  ds.input_size = 4;
  ds.samples.push_back({SignVector{1, 1, 1, 1}, Sign{1}});
  CHECK_NOTHROW(ds.validate());
  ds.samples.push_back({SignVector{1, 1}, Sign{-1}});
  CHECK_THROWS_AS(ds.validate(), std::invalid_argument);

  ModelWeights w;
  w.quantum = {SignVector{1, 1}, SignVector{1, -1}};
  w.classical = SignVector{1};
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  w.classical = SignVector{1, -1};
  CHECK_NOTHROW(w.validate());
}

TEST_SUITE_END();
