#pragma once

// mvpac command line: gen, train, experiment.
// Exit codes: 0 success, 1 usage error, 2 runtime failure or partial experiment.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvpac/bounds.hpp"
#include "mvpac/data.hpp"
#include "mvpac/errors.hpp"
#include "mvpac/experiment.hpp"
#include "mvpac/trainers.hpp"

namespace mvpac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline std::vector<BoundKind> parse_bound_list(const std::string& s) {
  if (s == "all") return {kAllBounds.begin(), kAllBounds.end()};
  std::vector<BoundKind> out;
  for (const auto& name : split_list(s)) out.push_back(parse_bound(name));
  if (out.empty()) throw UsageError("--bounds: empty list");
  return out;
}

inline std::vector<Algorithm> parse_algorithm_list(const std::string& s) {
  if (s == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<Algorithm> out;
  for (const auto& name : split_list(s)) out.push_back(parse_algorithm(name));
  if (out.empty()) throw UsageError("--algorithms: empty list");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) {
    double v = 0.0;
    if (!detail::parse_double(tok, v) || !(v > 0.0))
      throw UsageError(std::string(flag) + ": expected positive numbers, got '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  write(f);
  f.flush();
  if (!f) throw InputError("write failed: " + path);
}

struct SyntheticFlags {
  std::uint64_t seed = 1;
  std::size_t n = 2000;
  std::size_t dim = 50;
  double noise = 0.4;
};

inline void check_synthetic(const SyntheticFlags& s) {
  if (s.n == 0 || s.n % 2 != 0)
    throw UsageError("--n must be even (half of the points per class), got " + std::to_string(s.n));
  if (s.dim == 0) throw UsageError("--dim must be positive");
  if (!(s.noise >= 0.0)) throw UsageError("--noise must be nonnegative");
}

inline TwoViewDataset load_or_generate(const std::string& dataset, const SyntheticFlags& s) {
  if (dataset == "synthetic") {
    check_synthetic(s);
    return gen_synthetic(s.seed, static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(s.dim),
                         s.noise);
  }
  return load_two_view(dataset);
}

// ---------------------------------------------------------------------------

struct TrainFlags {
  std::string dataset;
  std::string algorithm = "MvSVM";
  std::optional<double> c, c1, c2;
  std::size_t folds = 3;
  std::string out;
};

inline nlohmann::json cmd_train(const TrainFlags& f, const SyntheticFlags& syn) {
  const Algorithm a = parse_algorithm(f.algorithm);
  if (f.c && f.c1) throw UsageError("--c and --c1 are aliases; pass only one");
  if (f.c2 && !is_multiview(a)) throw UsageError("--c2 applies to MvSVM and SMvSVM only");
  const std::optional<double> c1 = f.c ? f.c : f.c1;
  if (c1 && !(*c1 > 0.0)) throw UsageError("C1 must be positive");
  if (f.c2 && !(*f.c2 >= 0.0)) throw UsageError("C2 must be nonnegative");

  const TwoViewDataset ds = augment_and_scale(load_or_generate(f.dataset, syn));
  const Matrix& x1 = ds.x1;
  const Matrix& x2 = ds.x2;
  const Vector& y = ds.y;
  if (y.size() == 0) throw InputError("dataset has no labeled rows");

  const std::vector<double> g1 = c1 ? std::vector<double>{*c1} : c1_grid(a);
  const std::vector<double> g2 = f.c2 ? std::vector<double>{*f.c2} : c2_grid(a);
  nlohmann::json cv = nullptr;
  double chosen1 = g1.front(), chosen2 = g2.front();
  if (g1.size() * g2.size() > 1) {
    if (y.size() < 2) throw InputError("cross-validation needs at least two labeled rows");
    const std::size_t k = std::min<std::size_t>(f.folds, static_cast<std::size_t>(y.size()));
    const auto choice = cross_validate(a, x1, x2, y, ds.u1, ds.u2, k, derive_seed(syn.seed, 1000),
                                       g1, g2);
    chosen1 = choice.c1;
    chosen2 = choice.c2;
    cv = {{"folds", k}, {"error", choice.cv_error}};
  }
  const Fit fitted = fit(a, x1, x2, y, ds.u1, ds.u2, chosen1, chosen2);

  nlohmann::json j;
  j["algorithm"] = algorithm_name(a);
  j["dataset"] = f.dataset;
  j["labeled"] = y.size();
  j["unlabeled"] = ds.unlabeled_count();
  j["scale_factor"] = ds.scale_factor;
  if (is_multiview(a))
    j["hyperparameters"] = {{"C1", chosen1}, {"C2", chosen2}};
  else
    j["hyperparameters"] = {{"C", chosen1}};
  j["cross_validation"] = cv;
  j["training_error"] = error_rate(fitted.weights, x1, x2, y);
  j["dual"] = std::vector<double>(fitted.dual.begin(), fitted.dual.end());
  j["weights"] = {
      {"w1", std::vector<double>(fitted.weights.w1.begin(), fitted.weights.w1.end())},
      {"w2", std::vector<double>(fitted.weights.w2.begin(), fitted.weights.w2.end())}};
  return j;
}

// ---------------------------------------------------------------------------

struct ExperimentFlags {
  std::string dataset = "synthetic";
  double setting = 0.2;
  double delta = 0.05;
  double sigma = 100.0;
  double eta = 1.0;
  std::size_t partitions = 10;
  std::string bounds = "all";
  std::string algorithms = "all";
  std::string mu_grid = "0.5";
  std::string mvsvm_prior = "unit";
  double prior_ridge = 1.0;
  std::size_t threads = 0;
  std::string format = "json";
  std::string out;
};

inline ExperimentConfig experiment_config(const ExperimentFlags& f, const SyntheticFlags& syn) {
  ExperimentConfig cfg;
  cfg.dataset = f.dataset;
  if (f.dataset == "synthetic") check_synthetic(syn);
  cfg.synthetic_n = syn.n;
  cfg.synthetic_dim = syn.dim;
  cfg.noise_sd = syn.noise;
  cfg.seed = syn.seed;
  cfg.setting = f.setting;
  cfg.delta = f.delta;
  cfg.sigma = f.sigma;
  cfg.eta = f.eta;
  cfg.partitions = f.partitions;
  cfg.bounds = parse_bound_list(f.bounds);
  cfg.algorithms = parse_algorithm_list(f.algorithms);
  cfg.mu_grid = parse_double_list(f.mu_grid, "--mu-grid");
  cfg.mvsvm_prior_scaling = f.mvsvm_prior == "raw" ? PriorScaling::raw : PriorScaling::unit;
  cfg.prior_ridge = f.prior_ridge;
  cfg.threads = f.threads;
  return cfg;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view PAC-Bayes toolkit: SVM / MvSVM / SMvSVM training and bounds"};
  app.require_subcommand(1);

  SyntheticFlags syn;
  auto add_synthetic = [&](CLI::App* sub, bool with_seed) {
    if (with_seed) sub->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
    sub->add_option("--n", syn.n, "Synthetic sample count (even)")->capture_default_str();
    sub->add_option("--dim", syn.dim, "Synthetic dimension per view")->capture_default_str();
    sub->add_option("--noise", syn.noise, "Synthetic noise standard deviation")
        ->capture_default_str();
  };

  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic two-view dataset");
  add_synthetic(gen, true);
  gen->add_option("--out", gen_out, "Output file")->required();

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Cross-validate and train one algorithm");
  train->add_option("--dataset", tf.dataset, "Two-view file, or 'synthetic'")->required();
  train->add_option("--algorithm", tf.algorithm, "SVM-1, SVM-2, SVM-3, MvSVM or SMvSVM")
      ->capture_default_str();
  train->add_option("--c", tf.c, "C for single-view SVMs (skips CV over C)");
  train->add_option("--c1", tf.c1, "C1 (skips CV over C1)");
  train->add_option("--c2", tf.c2, "C2 co-regularization weight (skips CV over C2)");
  train->add_option("--folds", tf.folds, "Cross-validation folds")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000));
  train->add_option("--out", tf.out, "Report file (default stdout)");
  add_synthetic(train, true);

  ExperimentFlags ef;
  auto* exp = app.add_subcommand("experiment", "Run the partitioned evaluation protocol");
  exp->add_option("--dataset", ef.dataset, "Two-view file, or 'synthetic'")->capture_default_str();
  exp->add_option("--setting", ef.setting, "Labeled training fraction")
      ->capture_default_str()
      ->check(CLI::IsMember({0.2, 0.4, 0.6, 0.8}));
  exp->add_option("--delta", ef.delta, "Confidence parameter")
      ->capture_default_str()
      ->check(CLI::Range(1e-300, 1.0));
  exp->add_option("--sigma", ef.sigma, "Prior scale sigma")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  exp->add_option("--eta", ef.eta, "Prior center weight eta")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  exp->add_option("--partitions", ef.partitions, "Random partitions")
      ->capture_default_str()
      ->check(CLI::Range(1, 100000));
  exp->add_option("--bounds", ef.bounds, "Comma list of bounds, or 'all'")->capture_default_str();
  exp->add_option("--algorithms", ef.algorithms, "Comma list of algorithms, or 'all'")
      ->capture_default_str();
  exp->add_option("--mu-grid", ef.mu_grid, "Comma list of posterior scales mu")
      ->capture_default_str();
  exp->add_option("--mvsvm-prior", ef.mvsvm_prior, "MvPB-6 prior center scaling")
      ->capture_default_str()
      ->check(CLI::IsMember({"unit", "raw"}));
  exp->add_option("--prior-ridge", ef.prior_ridge, "Ridge for the MvPB-5 least-squares prior")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  exp->add_option("--threads", ef.threads, "Worker threads (0 = hardware)")->capture_default_str();
  exp->add_option("--format", ef.format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "csv"}));
  exp->add_option("--out", ef.out, "Report file (default stdout)");
  add_synthetic(exp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      check_synthetic(syn);
      const auto ds = gen_synthetic(syn.seed, static_cast<Eigen::Index>(syn.n),
                                    static_cast<Eigen::Index>(syn.dim), syn.noise);
      save_two_view(gen_out, ds);
      return kExitOk;
    }
    if (*train) {
      const auto report = cmd_train(tf, syn);
      emit(tf.out, out, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
      return kExitOk;
    }
    const auto cfg = experiment_config(ef, syn);
    const auto report = run_experiment(cfg);
    emit(ef.out, out, [&](std::ostream& o) {
      if (ef.format == "csv")
        write_csv(o, report);
      else
        o << to_json(report).dump(2) << '\n';
    });
    for (const auto& p : report.partitions)
      if (!p.ok) err << "partition " << p.index << " failed: " << p.diagnostic << '\n';
    return report.complete() ? kExitOk : kExitRuntime;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"mvpac"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mvpac::cli
