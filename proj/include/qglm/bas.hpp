#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qglm/core.hpp"

namespace qglm {

// Bars-and-Stripes generation: d x d grids flattened row-major, +1 = filled.
// Grids whose columns are each uniform (bars) or whose rows are each uniform
// (stripes) are the positive class; everything else is negative.
struct BasConfig {
  int side = 4;  // d
  int n_train = 30;
  int n_test = 30;
  double positive_fraction = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
};

bool is_bars_or_stripes(const SignVector& grid, int side);

// All 2^(d+1) - 2 distinct bars/stripes grids; the two uniform grids appear
// once each. Deterministic order: bars by column mask, then stripes.
std::vector<SignVector> enumerate_bas_patterns(int side);

struct GeneratedData {
  Dataset train;
  Dataset test;
  // Positive patterns that ended up in both splits; the splits sample the
  // same pattern family independently.
  int shared_positive_patterns = 0;
};

// Each split draws its positives without replacement from the pattern
// family, independently of the other split; negatives are uniform random
// grids with bars/stripes rejected. Deterministic given the seed.
GeneratedData generate_dataset(const BasConfig& cfg);

// Plain-text CSV: header "x0,...,x{dd-1},label", one sample per line,
// entries in {-1, 1}, LF line endings.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace qglm
