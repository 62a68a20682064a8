#pragma once

// Two-view datasets: synthetic generation, text I/O, augmentation/scaling, splits, folds.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mvpac/errors.hpp"
#include "mvpac/linalg.hpp"

namespace mvpac {

// ---------------------------------------------------------------------------
// Random numbers
//
// std::mt19937_64 has a fully specified output sequence; the distributions in <random>
// do not, so uniform/normal/shuffle are implemented here on top of the raw engine.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), rejection-sampled.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform();
    while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Dataset

struct TwoViewDataset {
  Eigen::Index d1 = 0;  // view widths before augmentation
  Eigen::Index d2 = 0;
  Matrix x1, x2;  // labeled rows
  Vector y;
  Matrix u1, u2;  // unlabeled rows
  bool augmented = false;
  double scale_factor = 1.0;

  Eigen::Index labeled_count() const { return y.size(); }
  Eigen::Index unlabeled_count() const { return u1.rows(); }
  Eigen::Index width1() const { return d1 + (augmented ? 1 : 0); }
  Eigen::Index width2() const { return d2 + (augmented ? 1 : 0); }
};

inline Matrix hconcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

/// Largest sqrt(|x1|^2 + |x2|^2) over labeled and unlabeled rows.
inline double max_concatenated_norm(const TwoViewDataset& ds) {
  double worst = 0.0;
  auto scan = [&](const Matrix& a, const Matrix& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      worst = std::max(worst, std::sqrt(a.row(i).squaredNorm() + b.row(i).squaredNorm()));
  };
  scan(ds.x1, ds.x2);
  scan(ds.u1, ds.u2);
  return worst;
}

/// Half positive, half negative points. Each view gets a random unit direction u_v;
/// a point is s u_v plus an N(0, I) component orthogonal to u_v, with s = y |N(0,1)|
/// shared by both views, then isotropic N(0, noise_sd^2) noise.
inline TwoViewDataset gen_synthetic(std::uint64_t seed, Eigen::Index n = 2000,
                                    Eigen::Index d_per_view = 50, double noise_sd = 0.4) {
  if (n <= 0 || n % 2 != 0) throw InputError("gen_synthetic: n must be even and positive (got " + std::to_string(n) + ")");
  if (d_per_view < 1) throw InputError("gen_synthetic: dimension must be positive");
  if (!(noise_sd >= 0.0)) throw InputError("gen_synthetic: noise_sd must be nonnegative");
  Rng rng(derive_seed(seed, 0));
  const auto d = d_per_view;
  Vector dir1 = rng.normal_vector(d).normalized();
  Vector dir2 = rng.normal_vector(d).normalized();

  TwoViewDataset ds;
  ds.d1 = ds.d2 = d;
  ds.x1.resize(n, d);
  ds.x2.resize(n, d);
  ds.y.resize(n);
  ds.u1.resize(0, d);
  ds.u2.resize(0, d);
  auto orthogonal = [&](const Vector& dir) {
    Vector z = rng.normal_vector(d);
    z -= dir.dot(z) * dir;
    return z;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const double label = i < n / 2 ? 1.0 : -1.0;
    const double s = label * std::abs(rng.normal());
    ds.y(i) = label;
    ds.x1.row(i) = (s * dir1 + orthogonal(dir1)).transpose();
    ds.x2.row(i) = (s * dir2 + orthogonal(dir2)).transpose();
  }
  if (noise_sd > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      ds.x1.row(i) += noise_sd * rng.normal_vector(d).transpose();
      ds.x2.row(i) += noise_sd * rng.normal_vector(d).transpose();
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Text format: "d1 d2" header, then "label v_1 ... v_{d1+d2}" per line, label in
// {-1, 0, +1} with 0 meaning unlabeled. Lines starting with '#' are comments.

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && errno != ERANGE && std::isfinite(out);
}

inline bool parse_count(const std::string& tok, long& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtol(tok.c_str(), &end, 10);
  return end == tok.c_str() + tok.size() && out > 0;
}

inline bool skippable(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace detail

inline TwoViewDataset parse_two_view(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long d1 = 0, d2 = 0;
  bool header = false;
  std::vector<std::vector<double>> lab_rows, unl_rows;
  std::vector<double> labels;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto tok = detail::tokens(line);
    if (!header) {
      if (tok.size() != 2 || !detail::parse_count(tok[0], d1) || !detail::parse_count(tok[1], d2))
        throw ParseError("malformed header, expected \"d1 d2\"", lineno);
      header = true;
      continue;
    }
    const auto width = static_cast<std::size_t>(d1 + d2);
    if (tok.size() != width + 1) {
      throw ParseError("expected label and " + std::to_string(width) + " values, found " +
                           std::to_string(tok.size() == 0 ? 0 : tok.size() - 1) + " values",
                       lineno);
    }
    double label = 0.0;
    if (!detail::parse_double(tok[0], label) || !(label == -1.0 || label == 0.0 || label == 1.0))
      throw ParseError("label must be -1, 0 or +1 (got \"" + tok[0] + "\")", lineno);
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j)
      if (!detail::parse_double(tok[j + 1], row[j]))
        throw ParseError("bad value \"" + tok[j + 1] + "\"", lineno);
    if (label == 0.0) {
      unl_rows.push_back(std::move(row));
    } else {
      lab_rows.push_back(std::move(row));
      labels.push_back(label);
    }
  }
  if (!header) throw ParseError("missing header", lineno == 0 ? 1 : lineno);

  TwoViewDataset ds;
  ds.d1 = d1;
  ds.d2 = d2;
  auto fill = [&](const std::vector<std::vector<double>>& rows, Matrix& a, Matrix& b) {
    a.resize(static_cast<Eigen::Index>(rows.size()), d1);
    b.resize(static_cast<Eigen::Index>(rows.size()), d2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (long j = 0; j < d1; ++j) a(r, j) = rows[i][static_cast<std::size_t>(j)];
      for (long j = 0; j < d2; ++j) b(r, j) = rows[i][static_cast<std::size_t>(d1 + j)];
    }
  };
  fill(lab_rows, ds.x1, ds.x2);
  fill(unl_rows, ds.u1, ds.u2);
  ds.y = Eigen::Map<const Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return ds;
}

inline TwoViewDataset load_two_view(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return parse_two_view(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.bare_message(), e.line());
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_two_view(std::ostream& out, const TwoViewDataset& ds) {
  if (ds.augmented) throw UsageError("write_two_view: dataset is already augmented");
  out << ds.d1 << ' ' << ds.d2 << '\n';
  auto row = [&](const char* label, const Matrix& a, const Matrix& b, Eigen::Index i) {
    out << label;
    for (Eigen::Index j = 0; j < a.cols(); ++j) out << ' ' << format_double(a(i, j));
    for (Eigen::Index j = 0; j < b.cols(); ++j) out << ' ' << format_double(b(i, j));
    out << '\n';
  };
  for (Eigen::Index i = 0; i < ds.labeled_count(); ++i)
    row(ds.y(i) > 0 ? "1" : "-1", ds.x1, ds.x2, i);
  for (Eigen::Index i = 0; i < ds.unlabeled_count(); ++i) row("0", ds.u1, ds.u2, i);
}

inline void save_two_view(const std::string& path, const TwoViewDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  write_two_view(out, ds);
  out.flush();
  if (!out) throw InputError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Augmentation and scaling

/// Appends a constant 1 to each view, then divides every row by the largest
/// concatenated norm over labeled and unlabeled rows.
inline TwoViewDataset augment_and_scale(const TwoViewDataset& in) {
  if (in.augmented) throw UsageError("augment_and_scale: dataset is already augmented");
  TwoViewDataset ds = in;
  auto append_one = [](const Matrix& a) {
    Matrix out(a.rows(), a.cols() + 1);
    out << a, Vector::Ones(a.rows());
    return out;
  };
  ds.x1 = append_one(in.x1);
  ds.x2 = append_one(in.x2);
  ds.u1 = append_one(in.u1);
  ds.u2 = append_one(in.u2);
  ds.augmented = true;
  const double scale = max_concatenated_norm(ds);
  ds.x1 /= scale;
  ds.x2 /= scale;
  ds.u1 /= scale;
  ds.u2 /= scale;
  ds.scale_factor = scale;
  return ds;
}

// ---------------------------------------------------------------------------
// Splits

struct SplitPlan {
  std::uint64_t seed = 0;
  double unlabeled_fraction = 0.2;
  double labeled_fraction = 0.2;
  std::size_t partitions = 10;
  double prior_subset_fraction = 0.2;
};

/// Indices into the dataset's labeled rows. train = prior_subset followed by held_in;
/// prior_subset, held_in, test and unlabeled are disjoint and cover every labeled row.
struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> prior_subset;
  std::vector<Eigen::Index> held_in;
  std::vector<Eigen::Index> test;
  std::vector<Eigen::Index> unlabeled;
};

inline std::size_t fraction_of(std::size_t n, double f) {
  return static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
}

inline Split split(const TwoViewDataset& ds, const SplitPlan& plan, std::size_t partition_index) {
  auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_open_unit(plan.unlabeled_fraction) || !in_open_unit(plan.labeled_fraction) ||
      !in_open_unit(plan.prior_subset_fraction))
    throw InputError("split: fractions must lie in (0, 1)");
  if (plan.partitions < 1) throw InputError("split: partitions must be at least 1");
  if (partition_index >= plan.partitions)
    throw InputError("split: partition index " + std::to_string(partition_index) +
                     " out of range");
  const auto n = static_cast<std::size_t>(ds.labeled_count());
  const std::size_t n_unl = fraction_of(n, plan.unlabeled_fraction);
  const std::size_t n_rest = n - n_unl;
  const std::size_t n_train = fraction_of(n_rest, plan.labeled_fraction);
  const std::size_t n_prior = fraction_of(n_train, plan.prior_subset_fraction);
  if (n_unl == 0 || n_train == 0 || n_train == n_rest || n_prior == 0 || n_prior == n_train)
    throw InputError("split: " + std::to_string(n) + " labeled examples leave an empty part");

  std::vector<Eigen::Index> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Eigen::Index>(i);
  Rng rng(derive_seed(plan.seed, 1 + partition_index));
  rng.shuffle(order);

  Split s;
  auto at = order.begin();
  s.unlabeled.assign(at, at + static_cast<std::ptrdiff_t>(n_unl));
  at += static_cast<std::ptrdiff_t>(n_unl);
  s.train.assign(at, at + static_cast<std::ptrdiff_t>(n_train));
  at += static_cast<std::ptrdiff_t>(n_train);
  s.test.assign(at, order.end());
  s.prior_subset.assign(s.train.begin(), s.train.begin() + static_cast<std::ptrdiff_t>(n_prior));
  s.held_in.assign(s.train.begin() + static_cast<std::ptrdiff_t>(n_prior), s.train.end());
  return s;
}

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validate;
};

/// k near-equal folds over positions 0..n-1; the first n % k folds get one extra.
inline std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InputError("kfold: k must be at least 2");
  if (k > n) throw InputError("kfold: k = " + std::to_string(k) + " exceeds " + std::to_string(n) + " examples");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<Fold> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= start && i < start + size)
        folds[f].validate.push_back(order[i]);
      else
        folds[f].train.push_back(order[i]);
    }
    start += size;
  }
  return folds;
}

}  // namespace mvpac
