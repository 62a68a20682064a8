#pragma once

// Experiment protocol: per-partition split, 3-fold CV over the C grids, training of
// SVM-1/2/3, MvSVM and SMvSVM, test errors, bound evaluation, and report assembly.

#include <algorithm>
#include <array>
#include <cctype>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mvpac/bounds.hpp"
#include "mvpac/data.hpp"
#include "mvpac/errors.hpp"
#include "mvpac/linalg.hpp"
#include "mvpac/trainers.hpp"

namespace mvpac {

inline const std::vector<double> kSvmCGrid = {
    1e-8, 5e-8, 1e-7, 5e-7, 1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3,
    1e-2, 5e-2, 1e-1, 5e-1, 1,    5,    10,   20,   25,   30,   40,   50,
    55,   60,   70,   80,   85,   90,   100,  300,  500,  700,  900,  1000};

inline const std::vector<double> kMvSvmCGrid = {1e-6, 1e-4, 1e-2, 1, 10, 100};

enum class Algorithm { SVM1, SVM2, SVM3, MvSVM, SMvSVM };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms = {
    Algorithm::SVM1, Algorithm::SVM2, Algorithm::SVM3, Algorithm::MvSVM, Algorithm::SMvSVM};

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::SVM1: return "SVM-1";
    case Algorithm::SVM2: return "SVM-2";
    case Algorithm::SVM3: return "SVM-3";
    case Algorithm::MvSVM: return "MvSVM";
    case Algorithm::SMvSVM: return "SMvSVM";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  lower.erase(std::remove(lower.begin(), lower.end(), '-'), lower.end());
  for (auto a : kAllAlgorithms) {
    std::string n(algorithm_name(a));
    std::transform(n.begin(), n.end(), n.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
    if (n == lower) return a;
  }
  std::string valid;
  for (auto a : kAllAlgorithms) valid += (valid.empty() ? "" : ", ") + std::string(algorithm_name(a));
  throw UsageError("unknown algorithm '" + std::string(name) + "' (valid: " + valid + ")");
}

/// The classifier each bound certifies.
inline Algorithm bound_subject(BoundKind k) {
  switch (k) {
    case BoundKind::PB1: return Algorithm::SVM1;
    case BoundKind::PB2: return Algorithm::SVM2;
    case BoundKind::PB3: return Algorithm::SVM3;
    case BoundKind::SMvPB1:
    case BoundKind::SMvPB2: return Algorithm::SMvSVM;
    default: return Algorithm::MvSVM;
  }
}

enum class PriorScaling { unit, raw };

struct ExperimentConfig {
  std::string dataset = "synthetic";  // or a two-view file path
  std::size_t synthetic_n = 2000;
  std::size_t synthetic_dim = 50;
  double noise_sd = 0.4;
  double setting = 0.2;
  double delta = 0.05;
  double sigma = 100.0;
  double eta = 1.0;
  std::uint64_t seed = 1;
  std::size_t partitions = 10;
  std::vector<BoundKind> bounds{kAllBounds.begin(), kAllBounds.end()};
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  double unlabeled_fraction = 0.2;
  double prior_subset_fraction = 0.2;
  double prior_ridge = 1.0;
  PriorScaling mvsvm_prior_scaling = PriorScaling::unit;
  std::vector<double> mu_grid = {0.5};
  std::size_t folds = 3;
  std::size_t threads = 0;  // 0: hardware concurrency capped by MVPAC_THREADS
};

struct PartitionRecord {
  std::size_t index = 0;
  bool ok = false;
  std::string diagnostic;
  std::map<std::string, double> test_error;
  std::map<std::string, nlohmann::json> hyperparameters;
  std::vector<BoundReport> bounds;
};

struct ExperimentReport {
  ExperimentConfig config;
  double scale_factor = 1.0;
  std::vector<PartitionRecord> partitions;

  bool complete() const {
    return std::all_of(partitions.begin(), partitions.end(),
                       [](const PartitionRecord& p) { return p.ok; });
  }
};

// ---------------------------------------------------------------------------
// Per-partition data

struct PartitionData {
  Matrix x1, x2;  // training rows (prior subset first)
  Vector y;
  Matrix t1, t2;  // test rows
  Vector ty;
  Matrix u1, u2;  // unlabeled rows
  Eigen::Index prior_count = 0;
};

inline PartitionData materialize(const TwoViewDataset& ds, const Split& s) {
  PartitionData p;
  const std::span<const Eigen::Index> train(s.train), test(s.test), unl(s.unlabeled);
  p.x1 = take_rows(ds.x1, train);
  p.x2 = take_rows(ds.x2, train);
  p.y = take(ds.y, train);
  p.t1 = take_rows(ds.x1, test);
  p.t2 = take_rows(ds.x2, test);
  p.ty = take(ds.y, test);
  // Labels of carved-out rows are dropped; any pool the file already carried is appended.
  p.u1.resize(static_cast<Eigen::Index>(s.unlabeled.size()) + ds.unlabeled_count(), ds.x1.cols());
  p.u2.resize(p.u1.rows(), ds.x2.cols());
  p.u1 << take_rows(ds.x1, unl), ds.u1;
  p.u2 << take_rows(ds.x2, unl), ds.u2;
  p.prior_count = static_cast<Eigen::Index>(s.prior_subset.size());
  return p;
}

template <typename Idx>
Matrix rows_of(const Matrix& m, const std::vector<Idx>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

template <typename Idx>
Vector entries_of(const Vector& v, const std::vector<Idx>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Training with cross-validation

inline Matrix view_matrix(Algorithm a, const Matrix& x1, const Matrix& x2) {
  switch (a) {
    case Algorithm::SVM1: return x1;
    case Algorithm::SVM2: return x2;
    default: return hconcat(x1, x2);
  }
}

inline SvmView svm_view(Algorithm a) {
  return a == Algorithm::SVM1 ? SvmView::first
                              : a == Algorithm::SVM2 ? SvmView::second : SvmView::concatenated;
}

struct Fit {
  LinearWeights weights;
  Vector dual;  // QP solution, reusable as a warm start
};

/// Fits one algorithm at fixed hyperparameters. `unl1/unl2` are used by SMvSVM only.
inline Fit fit(Algorithm a, const Matrix& x1, const Matrix& x2, const Vector& y,
               const Matrix& unl1, const Matrix& unl2, double c1, double c2,
               const std::optional<Vector>& start = std::nullopt) {
  TrainOptions opts;
  opts.start = start;
  switch (a) {
    case Algorithm::SVM1:
    case Algorithm::SVM2:
    case Algorithm::SVM3: {
      const Matrix x = view_matrix(a, x1, x2);
      const auto m = train_svm_linear(x, y, c1, opts);
      return {extract_linear_weights(m, x, svm_view(a), x1.cols(), x2.cols()), m.lambda};
    }
    case Algorithm::MvSVM:
    case Algorithm::SMvSVM: {
      LinearMvSvm m;
      if (a == Algorithm::MvSVM) {
        m = train_mvsvm_linear(x1, x2, y, c1, c2, opts);
      } else {
        Matrix a1(x1.rows() + unl1.rows(), x1.cols()), a2(x2.rows() + unl2.rows(), x2.cols());
        a1 << x1, unl1;
        a2 << x2, unl2;
        m = train_mvsvm_linear(a1, a2, y, c1, c2, opts);
      }
      Vector dual(2 * y.size());
      dual << m.model.lambda1, m.model.lambda2;
      return {std::move(m.weights), std::move(dual)};
    }
  }
  throw UsageError("fit: unknown algorithm");
}

struct CvChoice {
  double c1 = 0.0;
  double c2 = 0.0;
  double cv_error = 0.0;
};

/// k-fold CV over the algorithm's grid. Each fold walks the grid with C (or C1) increasing
/// so the previous dual solution is a feasible warm start; the winner is the smallest error,
/// ties broken by grid order (C1 major, then C2).
inline CvChoice cross_validate(Algorithm a, const Matrix& x1, const Matrix& x2, const Vector& y,
                               const Matrix& unl1, const Matrix& unl2, std::size_t k,
                               std::uint64_t seed, const std::vector<double>& g1,
                               const std::vector<double>& g2) {
  if (g1.empty() || g2.empty()) throw UsageError("cross_validate: empty parameter grid");
  const auto folds = kfold(static_cast<std::size_t>(y.size()), k, seed);
  // wrong[i1][i2]: misclassified validation examples summed over folds
  std::vector<std::vector<double>> wrong(g1.size(), std::vector<double>(g2.size(), 0.0));
  for (const auto& f : folds) {
    const Matrix fx1 = rows_of(x1, f.train), fx2 = rows_of(x2, f.train);
    const Matrix v1 = rows_of(x1, f.validate), v2 = rows_of(x2, f.validate);
    const Vector fy = entries_of(y, f.train), vy = entries_of(y, f.validate);
    for (std::size_t i2 = 0; i2 < g2.size(); ++i2) {
      std::optional<Vector> start;
      for (std::size_t i1 = 0; i1 < g1.size(); ++i1) {
        const auto r = fit(a, fx1, fx2, fy, unl1, unl2, g1[i1], g2[i2], start);
        wrong[i1][i2] += std::round(error_rate(r.weights, v1, v2, vy) * static_cast<double>(vy.size()));
        start = r.dual;
      }
    }
  }
  CvChoice best;
  bool have = false;
  for (std::size_t i1 = 0; i1 < g1.size(); ++i1) {
    for (std::size_t i2 = 0; i2 < g2.size(); ++i2) {
      const double err = wrong[i1][i2] / static_cast<double>(y.size());
      if (!have || err < best.cv_error) {
        have = true;
        best = {g1[i1], g2[i2], err};
      }
    }
  }
  return best;
}

inline bool is_multiview(Algorithm a) { return a == Algorithm::MvSVM || a == Algorithm::SMvSVM; }

/// C1 grid of an algorithm (the C grid for single-view SVMs).
inline const std::vector<double>& c1_grid(Algorithm a) {
  return is_multiview(a) ? kMvSvmCGrid : kSvmCGrid;
}

inline std::vector<double> c2_grid(Algorithm a) {
  return is_multiview(a) ? kMvSvmCGrid : std::vector<double>{0.0};
}

inline CvChoice cross_validate(Algorithm a, const Matrix& x1, const Matrix& x2, const Vector& y,
                               const Matrix& unl1, const Matrix& unl2, std::size_t k,
                               std::uint64_t seed) {
  return cross_validate(a, x1, x2, y, unl1, unl2, k, seed, c1_grid(a), c2_grid(a));
}

struct TrainedAlgorithm {
  CvChoice choice;
  LinearWeights weights;
};

inline TrainedAlgorithm train_with_cv(Algorithm a, const Matrix& x1, const Matrix& x2,
                                      const Vector& y, const Matrix& unl1, const Matrix& unl2,
                                      std::size_t k, std::uint64_t seed) {
  TrainedAlgorithm t;
  t.choice = cross_validate(a, x1, x2, y, unl1, unl2, k, seed);
  t.weights = fit(a, x1, x2, y, unl1, unl2, t.choice.c1, t.choice.c2).weights;
  return t;
}

// ---------------------------------------------------------------------------
// Bounds for a partition

inline Vector subset_prior_center(const PartitionData& p, const ExperimentConfig& cfg,
                                  BoundKind kind, std::uint64_t seed) {
  const auto r = p.prior_count;
  const Matrix s1 = p.x1.topRows(r), s2 = p.x2.topRows(r);
  const Vector sy = p.y.head(r);
  if (kind == BoundKind::MvPB5) {
    return least_squares_prior({hconcat(s1, s2), sy, s1.cols()}, cfg.prior_ridge);
  }
  const Matrix none1(0, s1.cols()), none2(0, s2.cols());
  const auto t = train_with_cv(Algorithm::MvSVM, s1, s2, sy, none1, none2,
                               std::min<std::size_t>(cfg.folds, static_cast<std::size_t>(r)),
                               seed);
  Vector w = t.weights.concatenated();
  if (cfg.mvsvm_prior_scaling == PriorScaling::unit) {
    const double n = w.norm();
    if (n > 0.0) w /= n;
  }
  return w;
}

// ---------------------------------------------------------------------------
// One partition

inline PartitionRecord run_partition(const TwoViewDataset& ds, const ExperimentConfig& cfg,
                                     std::size_t index) {
  PartitionRecord rec;
  rec.index = index;
  try {
    SplitPlan plan;
    plan.seed = cfg.seed;
    plan.unlabeled_fraction = cfg.unlabeled_fraction;
    plan.labeled_fraction = cfg.setting;
    plan.partitions = cfg.partitions;
    plan.prior_subset_fraction = cfg.prior_subset_fraction;
    const auto s = split(ds, plan, index);
    const auto p = materialize(ds, s);
    const std::uint64_t cv_seed = derive_seed(cfg.seed, 1000 + index);

    std::vector<Algorithm> needed = cfg.algorithms;
    for (auto b : cfg.bounds) needed.push_back(bound_subject(b));
    std::map<Algorithm, TrainedAlgorithm> trained;
    for (auto a : kAllAlgorithms) {
      if (std::find(needed.begin(), needed.end(), a) == needed.end()) continue;
      trained[a] = train_with_cv(a, p.x1, p.x2, p.y, p.u1, p.u2, cfg.folds, cv_seed);
      const auto& t = trained[a];
      nlohmann::json hp;
      if (a == Algorithm::MvSVM || a == Algorithm::SMvSVM) {
        hp["C1"] = t.choice.c1;
        hp["C2"] = t.choice.c2;
      } else {
        hp["C"] = t.choice.c1;
      }
      hp["cv_error"] = t.choice.cv_error;
      rec.hyperparameters[std::string(algorithm_name(a))] = hp;
    }
    for (auto a : cfg.algorithms)
      rec.test_error[std::string(algorithm_name(a))] =
          error_rate(trained.at(a).weights, p.t1, p.t2, p.ty);

    BoundConfig bc;
    bc.delta = cfg.delta;
    bc.sigma = cfg.sigma;
    bc.eta = cfg.eta;
    bc.mu_grid = cfg.mu_grid;
    bc.r_fraction = cfg.prior_subset_fraction;
    const Matrix xcat = hconcat(p.x1, p.x2);
    const Eigen::Index d1 = p.x1.cols();
    for (auto kind : cfg.bounds) {
      const auto& w = trained.at(bound_subject(kind)).weights;
      BoundInputs in;
      switch (kind) {
        case BoundKind::PB1:
          in.labeled = {p.x1, p.y, d1};
          in.w = w.w1;
          break;
        case BoundKind::PB2:
          in.labeled = {p.x2, p.y, p.x2.cols()};
          in.w = w.w2;
          break;
        default:
          in.labeled = {xcat, p.y, d1};
          in.w = w.concatenated();
          break;
      }
      if (kind == BoundKind::MvPB5 || kind == BoundKind::MvPB6) {
        const auto r = p.prior_count;
        in.held_in = LabeledSet{xcat.bottomRows(xcat.rows() - r), p.y.tail(p.y.size() - r), d1};
        in.prior_center = subset_prior_center(p, cfg, kind, derive_seed(cv_seed, 7));
        in.prior_subset_size = r;
      }
      if (kind == BoundKind::SMvPB1 || kind == BoundKind::SMvPB2)
        in.unlabeled_xt = signed_concatenation(hconcat(p.u1, p.u2), d1);
      rec.bounds.push_back(evaluate_bound(kind, in, bc));
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.diagnostic = e.what();
    rec.test_error.clear();
    rec.bounds.clear();
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Whole experiment

inline TwoViewDataset prepare_dataset(const ExperimentConfig& cfg) {
  TwoViewDataset raw =
      cfg.dataset == "synthetic"
          ? gen_synthetic(cfg.seed, static_cast<Eigen::Index>(cfg.synthetic_n),
                          static_cast<Eigen::Index>(cfg.synthetic_dim), cfg.noise_sd)
          : load_two_view(cfg.dataset);
  return augment_and_scale(raw);
}

inline std::size_t worker_count(const ExperimentConfig& cfg) {
  std::size_t n = cfg.threads;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MVPAC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, cfg.partitions));
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.partitions < 1) throw UsageError("partitions must be at least 1");
  if (!(cfg.setting > 0.0 && cfg.setting < 1.0)) throw UsageError("setting must lie in (0, 1)");
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw UsageError("delta must lie in (0, 1]");
  if (!(cfg.sigma > 0.0)) throw UsageError("sigma must be positive");
  if (!(cfg.eta > 0.0)) throw UsageError("eta must be positive");
  ExperimentReport report;
  report.config = cfg;
  const TwoViewDataset ds = prepare_dataset(cfg);
  report.scale_factor = ds.scale_factor;
  report.partitions.resize(cfg.partitions);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.partitions; i = next++)
      report.partitions[i] = run_partition(ds, cfg, i);
  };
  const std::size_t nw = worker_count(cfg);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return report;
}

// ---------------------------------------------------------------------------
// Summaries and serialization

struct SummaryRow {
  std::string method;
  double mean_pct = 0.0;
  double sd_pct = 0.0;
  std::size_t n_partitions = 0;
  std::size_t vacuous_count = 0;
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for a single value).
inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/// Algorithms first (test error), then bounds (risk bound), both in catalogue order.
inline std::vector<SummaryRow> summarize(const ExperimentReport& r) {
  std::vector<SummaryRow> rows;
  for (auto a : r.config.algorithms) {
    const std::string name(algorithm_name(a));
    std::vector<double> v;
    for (const auto& p : r.partitions)
      if (p.ok) v.push_back(100.0 * p.test_error.at(name));
    const auto [m, sd] = mean_sd(v);
    rows.push_back({name, m, sd, v.size(), 0});
  }
  for (std::size_t b = 0; b < r.config.bounds.size(); ++b) {
    const std::string name(bound_name(r.config.bounds[b]));
    std::vector<double> v;
    std::size_t vacuous = 0;
    for (const auto& p : r.partitions) {
      if (!p.ok) continue;
      v.push_back(100.0 * p.bounds[b].risk_bound);
      if (p.bounds[b].vacuous) ++vacuous;
    }
    const auto [m, sd] = mean_sd(v);
    rows.push_back({name, m, sd, v.size(), vacuous});
  }
  return rows;
}

inline nlohmann::json to_json(const BoundReport& b) {
  nlohmann::json j;
  j["bound"] = b.bound_name;
  j["risk_bound"] = b.risk_bound;
  j["deterministic_risk_bound"] = b.reported_deterministic();
  j["stochastic_error"] = b.stochastic_error;
  j["kl_numerator"] = b.vacuous ? nlohmann::json(nullptr) : nlohmann::json(b.kl_numerator);
  j["mu"] = b.mu_used;
  j["vacuous"] = b.vacuous;
  j["grid_selected_mu"] = b.grid_selected_mu;
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [k, v] : b.components) c[k] = v;
  j["components"] = c;
  return j;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset;
  if (c.dataset == "synthetic") {
    j["n"] = c.synthetic_n;
    j["dim"] = c.synthetic_dim;
    j["noise_sd"] = c.noise_sd;
  }
  j["setting"] = c.setting;
  j["delta"] = c.delta;
  j["sigma"] = c.sigma;
  j["eta"] = c.eta;
  j["seed"] = c.seed;
  j["partitions"] = c.partitions;
  j["folds"] = c.folds;
  j["unlabeled_fraction"] = c.unlabeled_fraction;
  j["prior_subset_fraction"] = c.prior_subset_fraction;
  j["prior_ridge"] = c.prior_ridge;
  j["mvsvm_prior_scaling"] = c.mvsvm_prior_scaling == PriorScaling::unit ? "unit" : "raw";
  j["mu_grid"] = c.mu_grid;
  std::vector<std::string> b, a;
  for (auto k : c.bounds) b.emplace_back(bound_name(k));
  for (auto k : c.algorithms) a.emplace_back(algorithm_name(k));
  j["bounds"] = b;
  j["algorithms"] = a;
  return j;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["config"]["scale_factor"] = r.scale_factor;
  j["complete"] = r.complete();
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : r.partitions) {
    nlohmann::json pj;
    pj["index"] = p.index;
    pj["ok"] = p.ok;
    if (!p.ok) pj["diagnostic"] = p.diagnostic;
    pj["test_error"] = p.test_error;
    nlohmann::json hp = nlohmann::json::object();
    for (const auto& [k, v] : p.hyperparameters) hp[k] = v;
    pj["hyperparameters"] = hp;
    nlohmann::json bs = nlohmann::json::array();
    for (const auto& b : p.bounds) bs.push_back(to_json(b));
    pj["bounds"] = bs;
    parts.push_back(pj);
  }
  j["partitions"] = parts;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : summarize(r)) {
    rows.push_back({{"method", s.method},
                    {"mean_pct", s.mean_pct},
                    {"sd_pct", s.sd_pct},
                    {"n_partitions", s.n_partitions},
                    {"vacuous_count", s.vacuous_count}});
  }
  j["summary"] = rows;
  return j;
}

inline void write_csv(std::ostream& out, const ExperimentReport& r) {
  out << "method,setting,mean_pct,sd_pct,n_partitions,vacuous_count\n";
  for (const auto& s : summarize(r)) {
    out << s.method << ',' << format_double(r.config.setting) << ',' << format_double(s.mean_pct)
        << ',' << format_double(s.sd_pct) << ',' << s.n_partitions << ',' << s.vacuous_count
        << '\n';
  }
}

}  // namespace mvpac
