#pragma once

// Dense linear algebra shared by the trainers and the bound evaluators.
// Samples are stored one per row; Gram matrices are n x n.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "mvpac/errors.hpp"

namespace mvpac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Kernel { linear };

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Gram matrix of the rows of `samples`.
inline Matrix gram(const Matrix& samples, Kernel kernel = Kernel::linear) {
  if (samples.rows() == 0) throw InputError("gram: empty sample list");
  switch (kernel) {
    case Kernel::linear: {
      Matrix k(samples.rows(), samples.rows());
      k.triangularView<Eigen::Lower>() = samples * samples.transpose();
      k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
      return k;
    }
  }
  throw UsageError("gram: unknown kernel");
}

/// Gram matrix of a list of vectors; all must share one dimension.
inline Matrix gram(std::span<const Vector> samples, Kernel kernel = Kernel::linear) {
  if (samples.empty()) throw InputError("gram: empty sample list");
  const auto dim = samples.front().size();
  Matrix rows(static_cast<Eigen::Index>(samples.size()), dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) {
      std::ostringstream os;
      os << "gram: sample " << i << " has dimension " << samples[i].size() << ", expected "
         << dim;
      throw InputError(os.str());
    }
    rows.row(static_cast<Eigen::Index>(i)) = samples[i].transpose();
  }
  return gram(rows, kernel);
}

/// ln|I + x x^T / sigma^2|, using the single nonzero eigenvalue of the rank-1 term.
inline double rank1_logdet(const Vector& x_tilde, double sigma) {
  if (!(sigma > 0.0)) throw InputError("rank1_logdet: sigma must be positive");
  return std::log1p(x_tilde.squaredNorm() / (sigma * sigma));
}

/// Factorization of a symmetric positive definite matrix (optionally ridged).
/// Used wherever the trainers need M^{-1} applied to many right-hand sides.
class PsdFactor {
 public:
  /// Factors M + ridge*I. With ridge == 0 and a failed factorization, retries once
  /// with ridge = 1e-10 * trace(M) / dim before giving up.
  explicit PsdFactor(const Matrix& m, double ridge = 0.0) {
    if (m.rows() != m.cols()) throw InputError("solve_psd: matrix is not square");
    if (ridge < 0.0) throw InputError("solve_psd: ridge must be nonnegative");
    const auto n = m.rows();
    if (n == 0) {
      ridge_ = ridge;
      return;
    }
    if (try_factor(m, ridge)) return;
    if (ridge == 0.0) {
      const double rescue = 1e-10 * std::max(m.trace(), 0.0) / static_cast<double>(n);
      if (rescue > 0.0 && try_factor(m, rescue)) return;
    }
    Eigen::LDLT<Matrix> ldlt(m + ridge * Matrix::Identity(n, n));
    const double pivot = ldlt.vectorD().minCoeff();
    std::ostringstream os;
    os << "solve_psd: matrix is numerically indefinite (smallest pivot " << pivot << ")";
    throw SingularityError(os.str(), pivot);
  }

  template <typename Rhs>
  Matrix solve(const Eigen::MatrixBase<Rhs>& b) const {
    if (b.rows() != llt_.rows()) throw InputError("solve_psd: right-hand side size mismatch");
    return llt_.solve(b);
  }

  /// ln det(M + ridge*I) from the Cholesky pivots.
  double logdet() const {
    const auto& l = llt_.matrixLLT();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) sum += std::log(l(i, i));
    return 2.0 * sum;
  }

  double ridge() const noexcept { return ridge_; }
  const Eigen::LLT<Matrix>& llt() const noexcept { return llt_; }

 private:
  bool try_factor(const Matrix& m, double ridge) {
    llt_.compute(m + ridge * Matrix::Identity(m.rows(), m.rows()));
    if (llt_.info() != Eigen::Success) return false;
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      const double p = l(i, i);
      if (!(p > 0.0) || !std::isfinite(p)) return false;
    }
    ridge_ = ridge;
    return true;
  }

  Eigen::LLT<Matrix> llt_;
  double ridge_ = 0.0;
};

/// Solves (M + ridge*I) x = b for symmetric positive (semi)definite M.
inline Vector solve_psd(const Matrix& m, const Vector& b, double ridge = 0.0) {
  if (m.rows() != b.size()) throw InputError("solve_psd: dimension mismatch");
  return PsdFactor(m, ridge).solve(b);
}

/// ln det of a symmetric positive definite matrix via Cholesky.
inline double logdet_spd(const Matrix& m) { return PsdFactor(m).logdet(); }

/// ln|I_d + (1/(u sigma^2)) sum_j x_j x_j^T| for the u rows x_j of `rows`.
/// Evaluated on the smaller of the d x d and u x u sides of det(I + X^T X) = det(I + X X^T).
inline double logdet_identity_plus_scatter(const Matrix& rows, double sigma) {
  if (!(sigma > 0.0)) throw InputError("logdet_identity_plus_scatter: sigma must be positive");
  if (rows.rows() == 0) throw InputError("logdet_identity_plus_scatter: empty row list");
  const auto u = rows.rows();
  const auto d = rows.cols();
  const double scale = 1.0 / (static_cast<double>(u) * sigma * sigma);
  if (d <= u) {
    Matrix m = Matrix::Identity(d, d);
    m.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose(), scale);
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    return logdet_spd(m);
  }
  Matrix m = Matrix::Identity(u, u);
  m.selfadjointView<Eigen::Lower>().rankUpdate(rows, scale);
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return logdet_spd(m);
}

/// Copies the rows listed in `idx`.
template <typename Index>
Matrix take_rows(const Matrix& m, std::span<const Index> idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

template <typename Index>
Vector take(const Vector& v, std::span<const Index> idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
  return out;
}

}  // namespace mvpac
