#include "qglm/bas.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qglm {

namespace {

Sample make_sample(SignVector input, int label) {
  Sample s;
  s.input = std::move(input);
  s.label = static_cast<Sign>(label);
  return s;
}

SignVector random_grid(int side, SeededRng& rng) {
  std::vector<Sign> cells(static_cast<std::size_t>(side) * side);
  for (Sign& c : cells) c = static_cast<Sign>(sample_sign(0.5, rng));
  return SignVector(std::move(cells));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             std::size_t column, const std::string& message) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                           ": column " + std::to_string(column) + ": " +
                           message);
}

}  // namespace

void BasConfig::validate() const {
  if (side < 2) throw std::invalid_argument("grid side must be >= 2");
  if (n_train < 1 || n_test < 1) {
    throw std::invalid_argument("both splits need at least one sample");
  }
  if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0)) {
    throw std::invalid_argument("positive fraction must lie in [0, 1]");
  }
}

bool is_bars_or_stripes(const SignVector& grid, int side) {
  if (grid.size() != static_cast<std::size_t>(side) * side) {
    throw std::invalid_argument("grid length does not match side " +
                                std::to_string(side));
  }
  const auto cell = [&](int r, int c) { return grid[r * side + c]; };
  bool bars = true;
  for (int c = 0; c < side && bars; ++c) {
    for (int r = 1; r < side; ++r) {
      if (cell(r, c) != cell(0, c)) {
        bars = false;
        break;
      }
    }
  }
  if (bars) return true;
  for (int r = 0; r < side; ++r) {
    bool uniform_row = true;
    for (int c = 1; c < side; ++c) {
      if (cell(r, c) != cell(r, 0)) {
        uniform_row = false;
        break;
      }
    }
    if (!uniform_row) return false;
  }
  return true;
}

std::vector<SignVector> enumerate_bas_patterns(int side) {
  if (side < 2) throw std::invalid_argument("grid side must be >= 2");
  const std::size_t cells = static_cast<std::size_t>(side) * side;
  const std::uint32_t masks = 1u << side;
  std::vector<SignVector> patterns;
  patterns.reserve(2 * masks - 2);
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    std::vector<Sign> grid(cells);
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        grid[r * side + c] = (mask >> c) & 1 ? Sign{1} : Sign{-1};
      }
    }
    patterns.emplace_back(std::move(grid));
  }
  // Stripes; the two uniform grids already appeared as bars.
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    if (mask == 0 || mask == masks - 1) continue;
    std::vector<Sign> grid(cells);
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        grid[r * side + c] = (mask >> r) & 1 ? Sign{1} : Sign{-1};
      }
    }
    patterns.emplace_back(std::move(grid));
  }
  return patterns;
}

GeneratedData generate_dataset(const BasConfig& cfg) {
  cfg.validate();
  const std::vector<SignVector> patterns = enumerate_bas_patterns(cfg.side);
  const auto positives_of = [&](int total) {
    return static_cast<std::size_t>(
        std::llround(cfg.positive_fraction * total));
  };
  const std::size_t train_pos = positives_of(cfg.n_train);
  const std::size_t test_pos = positives_of(cfg.n_test);
  if (train_pos > patterns.size() || test_pos > patterns.size()) {
    throw std::invalid_argument(
        "requested " + std::to_string(std::max(train_pos, test_pos)) +
        " distinct positive samples but only " +
        std::to_string(patterns.size()) + " patterns exist at side " +
        std::to_string(cfg.side));
  }

  SeededRng rng(cfg.seed);
  GeneratedData out;
  out.train.input_size = patterns.empty() ? 0 : patterns.front().size();
  out.test.input_size = out.train.input_size;

  const auto add_negatives = [&](Dataset& ds, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      SignVector grid = random_grid(cfg.side, rng);
      while (is_bars_or_stripes(grid, cfg.side)) {
        grid = random_grid(cfg.side, rng);
      }
      ds.samples.push_back(make_sample(std::move(grid), -1));
    }
  };

  // The two splits draw their positives independently from the same pattern
  // family (distinct within a split); shared patterns are counted for the
  // run metadata.
  const auto train_picks =
      rng.choose_without_replacement(patterns.size(), train_pos);
  for (std::size_t p : train_picks) {
    out.train.samples.push_back(make_sample(patterns[p], 1));
  }
  add_negatives(out.train, cfg.n_train - train_pos);
  rng.shuffle(out.train.samples);

  const auto test_picks =
      rng.choose_without_replacement(patterns.size(), test_pos);
  int shared = 0;
  for (std::size_t p : test_picks) {
    out.test.samples.push_back(make_sample(patterns[p], 1));
    shared += std::find(train_picks.begin(), train_picks.end(), p) !=
              train_picks.end();
  }
  out.shared_positive_patterns = shared;
  add_negatives(out.test, cfg.n_test - test_pos);
  rng.shuffle(out.test.samples);

  out.train.validate();
  out.test.validate();
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (std::size_t c = 0; c < data.input_size; ++c) {
    out << "x" << c << ",";
  }
  out << "label\n";
  for (const Sample& s : data.samples) {
    for (std::size_t c = 0; c < data.input_size; ++c) {
      out << static_cast<int>(s.input[c]) << ",";
    }
    out << static_cast<int>(s.label) << "\n";
  }
  if (!out.good()) throw std::runtime_error("write to " + path.string() + " failed");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": missing header line");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.front() != "x0" || header.back() != "label") {
    throw std::runtime_error(path.string() +
                             ":1: expected header \"x0,...,label\"");
  }
  const std::size_t width = header.size() - 1;

  Dataset data;
  data.input_size = width;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != width + 1) {
      parse_fail(path, line_no, fields.size(),
                 "expected " + std::to_string(width + 1) + " fields, got " +
                     std::to_string(fields.size()));
    }
    std::vector<Sign> entries(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      int value = 0;
      const auto& f = fields[c];
      const auto [ptr, ec] =
          std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        parse_fail(path, line_no, c + 1, "entry '" + f + "' is not an integer");
      }
      if (value != -1 && value != 1) {
        parse_fail(path, line_no, c + 1,
                   "entry must be -1 or 1, got '" + f + "'");
      }
      if (c < width) {
        entries[c] = static_cast<Sign>(value);
      } else {
        data.samples.push_back(make_sample(SignVector(std::move(entries)), value));
      }
    }
  }
  data.validate();
  return data;
}

}  // namespace qglm
