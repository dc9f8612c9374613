#include "qglm/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qglm/eval.hpp"
#include "qglm/qsim.hpp"

namespace qglm::harness {

using nlohmann::json;

namespace {

constexpr double kCircuitTolerance = 1e-10;

std::string format_row(const TrainRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d,%ld,%.6f,%.6f,%.6f,%.6f\n", r.trial,
                r.iteration, r.lr, r.loss_estimate, r.train_accuracy,
                r.test_accuracy);
  return buf;
}

void check_known_keys(const json& node, std::initializer_list<const char*> keys,
                      const std::string& where) {
  for (const auto& [key, value] : node.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
          return key == k;
        }) == keys.end()) {
      throw std::runtime_error("unknown config key '" + where + key + "'");
    }
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return out;
}

json model_to_json(const ModelConfig& m) {
  return json{{"input_size", m.input_size},
              {"hidden_count", m.hidden_count},
              {"hidden_response", response_kind_name(m.hidden_response)},
              {"output_response", response_kind_name(m.output_response)},
              {"linear_negative_slope", m.linear_negative_slope}};
}

SignVector sign_vector_from_json(const json& node) {
  std::vector<Sign> values;
  values.reserve(node.size());
  for (const auto& v : node) {
    values.push_back(static_cast<Sign>(v.get<int>()));
  }
  return SignVector(std::move(values));
}

ModelConfig model_from_json(const json& node) {
  ModelConfig m;
  m.input_size = node.at("input_size").get<std::size_t>();
  m.hidden_count = node.at("hidden_count").get<std::size_t>();
  m.hidden_response =
      parse_response_kind(node.at("hidden_response").get<std::string>());
  m.output_response =
      parse_response_kind(node.at("output_response").get<std::string>());
  m.linear_negative_slope = node.value("linear_negative_slope", false);
  return m;
}

int resolve_jobs(int jobs) {
  return jobs > 0 ? jobs : omp_get_max_threads();
}

}  // namespace

void ExperimentConfig::validate() const {
  model.validate();
  bas.validate();
  if (method == "svo") {
    svo.validate();
  } else if (method == "signflip") {
    signflip.validate();
  } else {
    throw std::invalid_argument("method must be 'svo' or 'signflip', got '" +
                                method + "'");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (eval_k < 1) throw std::invalid_argument("eval_k must be >= 1");
  if (train_data.empty() != test_data.empty()) {
    throw std::invalid_argument(
        "either both dataset paths or neither must be given");
  }
  if (train_data.empty() &&
      model.input_size !=
          static_cast<std::size_t>(bas.side) * static_cast<std::size_t>(bas.side)) {
    throw std::invalid_argument("model input size " +
                                std::to_string(model.input_size) +
                                " does not match grid side " +
                                std::to_string(bas.side));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }

  ExperimentConfig cfg;
  check_known_keys(root,
                   {"model", "method", "svo", "signflip", "bas", "trials",
                    "record_every", "eval_k", "jobs", "data"},
                   "");
  if (root.contains("model")) {
    const json& m = root["model"];
    check_known_keys(m,
                     {"input_size", "hidden_count", "hidden_response",
                      "output_response", "linear_negative_slope"},
                     "model.");
    cfg.model.input_size = m.value("input_size", cfg.model.input_size);
    cfg.model.hidden_count = m.value("hidden_count", cfg.model.hidden_count);
    if (m.contains("hidden_response")) {
      cfg.model.hidden_response =
          parse_response_kind(m["hidden_response"].get<std::string>());
    }
    if (m.contains("output_response")) {
      cfg.model.output_response =
          parse_response_kind(m["output_response"].get<std::string>());
    }
    cfg.model.linear_negative_slope =
        m.value("linear_negative_slope", cfg.model.linear_negative_slope);
  }
  cfg.method = root.value("method", cfg.method);
  if (root.contains("svo")) {
    const json& s = root["svo"];
    check_known_keys(s,
                     {"weight_samples", "batch_size", "iterations", "eta_base",
                      "eta_max", "step_size", "gamma", "phi_init_scale", "seed"},
                     "svo.");
    cfg.svo.weight_samples = s.value("weight_samples", cfg.svo.weight_samples);
    cfg.svo.batch_size = s.value("batch_size", cfg.svo.batch_size);
    cfg.svo.iterations = s.value("iterations", cfg.svo.iterations);
    cfg.svo.eta_base = s.value("eta_base", cfg.svo.eta_base);
    cfg.svo.eta_max = s.value("eta_max", cfg.svo.eta_max);
    cfg.svo.step_size = s.value("step_size", cfg.svo.step_size);
    cfg.svo.gamma = s.value("gamma", cfg.svo.gamma);
    cfg.svo.phi_init_scale = s.value("phi_init_scale", cfg.svo.phi_init_scale);
    cfg.svo.seed = s.value("seed", cfg.svo.seed);
  }
  if (root.contains("signflip")) {
    const json& s = root["signflip"];
    check_known_keys(s, {"flip_fraction", "iterations", "threshold", "seed"},
                     "signflip.");
    cfg.signflip.flip_fraction =
        s.value("flip_fraction", cfg.signflip.flip_fraction);
    cfg.signflip.iterations = s.value("iterations", cfg.signflip.iterations);
    cfg.signflip.threshold = s.value("threshold", cfg.signflip.threshold);
    cfg.signflip.seed = s.value("seed", cfg.signflip.seed);
  }
  if (root.contains("bas")) {
    const json& b = root["bas"];
    check_known_keys(
        b, {"side", "n_train", "n_test", "positive_fraction", "seed"}, "bas.");
    cfg.bas.side = b.value("side", cfg.bas.side);
    cfg.bas.n_train = b.value("n_train", cfg.bas.n_train);
    cfg.bas.n_test = b.value("n_test", cfg.bas.n_test);
    cfg.bas.positive_fraction =
        b.value("positive_fraction", cfg.bas.positive_fraction);
    cfg.bas.seed = b.value("seed", cfg.bas.seed);
  }
  cfg.trials = root.value("trials", cfg.trials);
  cfg.record_every = root.value("record_every", cfg.record_every);
  cfg.eval_k = root.value("eval_k", cfg.eval_k);
  cfg.jobs = root.value("jobs", cfg.jobs);
  if (root.contains("data")) {
    const json& d = root["data"];
    check_known_keys(d, {"train", "test"}, "data.");
    cfg.train_data = d.value("train", cfg.train_data);
    cfg.test_data = d.value("test", cfg.test_data);
  }
  return cfg;
}

std::string resolved_config_json(const ExperimentConfig& cfg) {
  json root;
  root["model"] = model_to_json(cfg.model);
  root["method"] = cfg.method;
  root["svo"] = {{"weight_samples", cfg.svo.weight_samples},
                 {"batch_size", cfg.svo.batch_size},
                 {"iterations", cfg.svo.iterations},
                 {"eta_base", cfg.svo.eta_base},
                 {"eta_max", cfg.svo.eta_max},
                 {"step_size", cfg.svo.step_size},
                 {"gamma", cfg.svo.gamma},
                 {"phi_init_scale", cfg.svo.phi_init_scale},
                 {"seed", cfg.svo.seed}};
  root["signflip"] = {{"flip_fraction", cfg.signflip.flip_fraction},
                      {"iterations", cfg.signflip.iterations},
                      {"threshold", cfg.signflip.threshold},
                      {"seed", cfg.signflip.seed}};
  root["bas"] = {{"side", cfg.bas.side},
                 {"n_train", cfg.bas.n_train},
                 {"n_test", cfg.bas.n_test},
                 {"positive_fraction", cfg.bas.positive_fraction},
                 {"seed", cfg.bas.seed}};
  root["trials"] = cfg.trials;
  root["record_every"] = cfg.record_every;
  root["eval_k"] = cfg.eval_k;
  root["jobs"] = cfg.jobs;
  root["data"] = {{"train", cfg.train_data}, {"test", cfg.test_data}};
  return root.dump(2);
}

void write_records_csv(const std::filesystem::path& path,
                       std::span<const TrainRecord> records) {
  auto out = open_for_write(path);
  out << "trial,iteration,lr,loss_estimate,train_accuracy,test_accuracy\n";
  for (const TrainRecord& r : records) out << format_row(r);
}

void write_mean_curve_csv(const std::filesystem::path& path,
                          std::span<const std::vector<TrainRecord>> trials) {
  if (trials.empty()) throw std::invalid_argument("no trials to average");
  const std::size_t rows = trials.front().size();
  for (const auto& t : trials) {
    if (t.size() != rows) {
      throw std::invalid_argument("trials recorded different row counts");
    }
  }
  auto out = open_for_write(path);
  out << "iteration,mean_test_accuracy,std_test_accuracy,"
         "mean_train_accuracy,std_train_accuracy\n";
  const double n = static_cast<double>(trials.size());
  for (std::size_t r = 0; r < rows; ++r) {
    double mean_test = 0.0, mean_train = 0.0;
    for (const auto& t : trials) {
      mean_test += t[r].test_accuracy;
      mean_train += t[r].train_accuracy;
    }
    mean_test /= n;
    mean_train /= n;
    double var_test = 0.0, var_train = 0.0;
    for (const auto& t : trials) {
      var_test += (t[r].test_accuracy - mean_test) * (t[r].test_accuracy - mean_test);
      var_train +=
          (t[r].train_accuracy - mean_train) * (t[r].train_accuracy - mean_train);
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%ld,%.6f,%.6f,%.6f,%.6f\n",
                  trials.front()[r].iteration, mean_test,
                  std::sqrt(var_test / n), mean_train, std::sqrt(var_train / n));
    out << buf;
  }
}

void save_variational_model(const std::filesystem::path& path,
                            const VariationalParams& phi,
                            const ModelConfig& model) {
  json root;
  root["type"] = "variational";
  root["model"] = model_to_json(model);
  json rows = json::array();
  for (std::size_t m = 0; m < phi.hidden_count; ++m) {
    json row = json::array();
    for (std::size_t n = 0; n < phi.input_size; ++n) row.push_back(phi.quantum(m, n));
    rows.push_back(std::move(row));
  }
  root["phi_quantum"] = std::move(rows);
  json cls = json::array();
  for (std::size_t m = 0; m < phi.hidden_count; ++m) cls.push_back(phi.classical(m));
  root["phi_classical"] = std::move(cls);
  open_for_write(path) << root.dump(2) << "\n";
}

void save_ensemble_model(const std::filesystem::path& path,
                         std::span<const SignVector> weights,
                         const ModelConfig& model, double threshold) {
  json root;
  root["type"] = "ensemble";
  root["model"] = model_to_json(model);
  root["threshold"] = threshold;
  json rows = json::array();
  for (const SignVector& w : weights) {
    json row = json::array();
    for (std::size_t n = 0; n < w.size(); ++n) row.push_back(w[n]);
    rows.push_back(std::move(row));
  }
  root["weights"] = std::move(rows);
  open_for_write(path) << root.dump(2) << "\n";
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  Dataset train_set, test_set;
  int shared_positives = 0;
  if (!cfg.train_data.empty()) {
    train_set = load_dataset(cfg.train_data);
    test_set = load_dataset(cfg.test_data);
  } else {
    GeneratedData generated = generate_dataset(cfg.bas);
    train_set = std::move(generated.train);
    test_set = std::move(generated.test);
    shared_positives = generated.shared_positive_patterns;
  }
  if (train_set.input_size != cfg.model.input_size ||
      test_set.input_size != cfg.model.input_size) {
    throw std::invalid_argument(
        "dataset input size " + std::to_string(train_set.input_size) +
        " does not match model input size " +
        std::to_string(cfg.model.input_size));
  }
  save_dataset(train_set, out_dir / "train.csv");
  save_dataset(test_set, out_dir / "test.csv");

  const bool is_svo = cfg.method == "svo";
  const std::uint64_t base_seed = is_svo ? cfg.svo.seed : cfg.signflip.seed;
  const int jobs = resolve_jobs(cfg.jobs);

  std::vector<std::vector<TrainRecord>> per_trial(cfg.trials);
  std::vector<VariationalParams> phis(cfg.trials);
  std::vector<std::vector<SignVector>> ensembles(cfg.trials);

  const auto run_trial = [&](int trial, int inner_threads) {
    TrainOptions options;
    options.record_every = cfg.record_every;
    options.eval_k = cfg.eval_k;
    options.threads = inner_threads;
    if (is_svo) {
      SvoConfig trial_cfg = cfg.svo;
      trial_cfg.seed = base_seed + static_cast<std::uint64_t>(trial);
      SvoResult res = train(train_set, test_set, cfg.model, trial_cfg, options);
      phis[trial] = std::move(res.phi);
      per_trial[trial] = std::move(res.records);
    } else {
      SignFlipConfig trial_cfg = cfg.signflip;
      trial_cfg.seed = base_seed + static_cast<std::uint64_t>(trial);
      SignFlipResult res =
          train_signflip(train_set, test_set, cfg.model, trial_cfg, options);
      ensembles[trial] = std::move(res.weights);
      per_trial[trial] = std::move(res.records);
    }
    for (TrainRecord& r : per_trial[trial]) r.trial = trial;
  };

  if (cfg.trials > 1 && jobs > 1) {
    // Trials in parallel, each internally serial. Exceptions must not cross
    // the parallel region; the first one aborts the remaining work.
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::min(jobs, cfg.trials))
    for (int trial = 0; trial < cfg.trials; ++trial) {
      if (failed.load()) continue;
      try {
        run_trial(trial, 1);
      } catch (...) {
#pragma omp critical(qglm_trial_failure)
        {
          if (!failure) failure = std::current_exception();
        }
        failed.store(true);
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int trial = 0; trial < cfg.trials; ++trial) run_trial(trial, jobs);
  }

  ExperimentSummary summary;
  summary.output_dir = out_dir;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    char name[48];
    std::snprintf(name, sizeof(name), "trial_%03d.csv", trial);
    const auto csv_path = out_dir / name;
    write_records_csv(csv_path, per_trial[trial]);
    summary.trial_csvs.push_back(csv_path);

    std::snprintf(name, sizeof(name), "model_trial_%03d.json", trial);
    if (is_svo) {
      save_variational_model(out_dir / name, phis[trial], cfg.model);
    } else {
      save_ensemble_model(out_dir / name, ensembles[trial], cfg.model,
                          cfg.signflip.threshold);
    }
  }
  summary.mean_curve_csv = out_dir / "mean_curve.csv";
  write_mean_curve_csv(summary.mean_curve_csv, per_trial);

  double mean_test = 0.0, mean_train = 0.0;
  for (const auto& records : per_trial) {
    mean_test += records.back().test_accuracy;
    mean_train += records.back().train_accuracy;
  }
  summary.final_mean_test_accuracy = mean_test / cfg.trials;
  summary.final_mean_train_accuracy = mean_train / cfg.trials;

  json meta;
  meta["version"] = std::string(kVersion);
  meta["config"] = json::parse(resolved_config_json(cfg));
  meta["dataset"] = {{"train_samples", train_set.size()},
                     {"test_samples", test_set.size()},
                     {"shared_positive_patterns", shared_positives}};
  meta["notes"] = {
      {"lr_schedule",
       "triangular cycles: c = floor(1 + i/(2s)), t = |i/s - 2c + 1|, "
       "eta = eta_base + (eta_max - eta_base) * max(0, 1 - t) * "
       "(1 + sin(c*pi/2)), clamped to [eta_base, eta_max]"},
      {"update_rule",
       "descent: phi <- phi - lr * mean_t[(loss_t - b) * grad_t]"},
      {"baseline",
       "per-parameter variance-minimizing ratio: moving average of "
       "loss * grad^2 over moving average of grad^2, decay gamma"},
      {"prediction",
       "average output probability over eval_k hidden samples, threshold "
       "1/2, ties toward +1; trained runs predict with sign(phi)"}};
  summary.metadata_file = out_dir / "metadata.json";
  open_for_write(summary.metadata_file) << meta.dump(2) << "\n";
  return summary;
}

int verify_circuit(int n, std::ostream& out) {
  if (n != 2 && n != 4 && n != 8 && n != 16) {
    throw std::invalid_argument("supported sizes are 2, 4, 8 and 16");
  }
  double max_dev = 0.0;
  long pairs = 0;
  const auto check_pair = [&](const SignVector& x, const SignVector& w) {
    const double expected = normalized_inner_product(x, w);
    const double dev = std::abs(ancilla_probability(x, w) - expected * expected);
    max_dev = std::max(max_dev, dev);
    ++pairs;
  };

  if (n <= 4) {
    const std::uint32_t combos = 1u << n;
    const auto vec_of = [&](std::uint32_t mask) {
      std::vector<Sign> v(n);
      for (int j = 0; j < n; ++j) v[j] = (mask >> j) & 1 ? Sign{1} : Sign{-1};
      return SignVector(std::move(v));
    };
    for (std::uint32_t a = 0; a < combos; ++a) {
      const SignVector x = vec_of(a);
      for (std::uint32_t b = 0; b < combos; ++b) check_pair(x, vec_of(b));
    }
  } else {
    SeededRng rng(0x5157u + static_cast<std::uint64_t>(n));
    for (int i = 0; i < 10000; ++i) {
      std::vector<Sign> xv(n), wv(n);
      for (int j = 0; j < n; ++j) xv[j] = static_cast<Sign>(sample_sign(0.5, rng));
      for (int j = 0; j < n; ++j) wv[j] = static_cast<Sign>(sample_sign(0.5, rng));
      check_pair(SignVector(std::move(xv)), SignVector(std::move(wv)));
    }
  }

  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "n=%d: max deviation %.3e over %ld pairs (tolerance %.0e)\n", n,
                max_dev, pairs, kCircuitTolerance);
  out << buf;
  return max_dev < kCircuitTolerance ? 0 : 1;
}

double evaluate_model_file(const std::filesystem::path& model_path,
                           const std::filesystem::path& data_path, int k,
                           std::uint64_t seed, std::ostream& out) {
  std::ifstream in(model_path);
  if (!in) throw std::runtime_error("cannot open model " + model_path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("model " + model_path.string() + ": " + e.what());
  }
  const Dataset data = load_dataset(data_path);
  const ModelConfig model = model_from_json(root.at("model"));
  if (data.input_size != model.input_size) {
    throw std::runtime_error("dataset input size " +
                             std::to_string(data.input_size) +
                             " does not match model input size " +
                             std::to_string(model.input_size));
  }

  const std::string type = root.at("type").get<std::string>();
  double accuracy = 0.0;
  if (type == "variational") {
    VariationalParams phi =
        VariationalParams::zeros(model.hidden_count, model.input_size);
    const json& rows = root.at("phi_quantum");
    if (rows.size() != model.hidden_count) {
      throw std::runtime_error("model file has " + std::to_string(rows.size()) +
                               " parameter rows, expected " +
                               std::to_string(model.hidden_count));
    }
    for (std::size_t m = 0; m < model.hidden_count; ++m) {
      const json& row = rows[m];
      if (row.size() != model.input_size) {
        throw std::runtime_error("parameter row " + std::to_string(m) +
                                 " has length " + std::to_string(row.size()) +
                                 ", expected " +
                                 std::to_string(model.input_size));
      }
      for (std::size_t n = 0; n < model.input_size; ++n) {
        phi.quantum(m, n) = row[n].get<double>();
      }
    }
    const json& cls = root.at("phi_classical");
    if (cls.size() != model.hidden_count) {
      throw std::runtime_error("classical parameter length mismatch");
    }
    for (std::size_t m = 0; m < model.hidden_count; ++m) {
      phi.classical(m) = cls[m].get<double>();
    }
    accuracy = eval::model_accuracy(data, mode_weights(phi), model, k, seed,
                                    omp_get_max_threads());
  } else if (type == "ensemble") {
    std::vector<SignVector> weights;
    for (const json& row : root.at("weights")) {
      weights.push_back(sign_vector_from_json(row));
    }
    for (const SignVector& w : weights) {
      if (w.size() != model.input_size) {
        throw std::runtime_error("ensemble weight length " +
                                 std::to_string(w.size()) + ", expected " +
                                 std::to_string(model.input_size));
      }
    }
    accuracy = eval::ensemble_accuracy(
        data, weights, model.hidden_response, omp_get_max_threads(),
        root.value("threshold", 0.5), model.linear_negative_slope);
  } else {
    throw std::runtime_error("unknown model type '" + type + "'");
  }

  char buf[64];
  std::snprintf(buf, sizeof(buf), "accuracy %.6f\n", accuracy);
  out << buf;
  return accuracy;
}

}  // namespace qglm::harness
