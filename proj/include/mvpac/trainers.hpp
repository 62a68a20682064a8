#pragma once

// SVM, multi-view SVM (MvSVM) and semi-supervised multi-view SVM (SMvSVM) trainers.
//
// All three are trained through their box-constrained duals. The multi-view duals
// are assembled from Gram matrices in two algebraically identical ways:
//
//  * MvSvmRoute::schur follows the Schur-complement derivation directly:
//      K~_v = K_v + 2 C2 K_v K_v,  K-_1 = 2 C2 K_1 K_2 = K-_2^T,
//      M_1 = K~_1 - K-_1 K~_2^{-1} K-_2  (and symmetrically M_2),
//    with blocks A = Y K_1 M_1^{-1} K_1 Y, B, D and alphas recovered through M_v^{-1}.
//    It needs K~_v and M_v invertible, i.e. full-rank Gram matrices.
//
//  * MvSvmRoute::push_through rewrites the same quantities with the push-through
//    identity K_b (I + 2 C2 J^T J K_b)^{-1} = K_b - 2 C2 K_b J^T (I + 2 C2 (K_1 + K_2))^{-1} J K_b,
//    where K_b = diag(K_1, K_2) and J = [I, -I]. Only I + 2 C2 (K_1 + K_2) is inverted,
//    and its eigenvalues are >= 1, so rank-deficient Gram matrices (linear kernel with
//    more samples than features) are handled exactly.
//
// For the linear kernel, train_mvsvm_linear solves the same dual in feature space with
// a low-rank factor of the dual Hessian, which is what the experiment harness uses.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <utility>

#include "mvpac/errors.hpp"
#include "mvpac/linalg.hpp"
#include "mvpac/qp.hpp"

namespace mvpac {

struct TrainOptions {
  double tol = 1e-8;
  std::size_t max_iters = 0;
  std::optional<Vector> start;  // dual warm start; clipped into the box
};

struct SvmModel {
  Vector lambda;  // dual variables, 0 <= lambda_i <= C
  Vector labels;  // y in {-1, +1}
  double C = 0.0;
  double dual_objective = 0.0;
  std::size_t iterations = 0;
};

struct MvSvmModel {
  Vector alpha1;  // length n (MvSVM) or n + u (SMvSVM)
  Vector alpha2;
  Vector lambda1;  // length n
  Vector lambda2;
  Vector labels;
  double C1 = 0.0;
  double C2 = 0.0;
  bool semi_supervised = false;
  double dual_objective = 0.0;
  std::size_t iterations = 0;
};

struct MvSvmMatrices {
  Matrix Kt1, Kb1, Kt2, Kb2, M1, M2;
};

struct LinearWeights {
  Vector w1;
  Vector w2;

  Vector concatenated() const {
    Vector w(w1.size() + w2.size());
    w << w1, w2;
    return w;
  }
  double concatenated_norm() const { return std::sqrt(w1.squaredNorm() + w2.squaredNorm()); }
};

enum class MvSvmRoute { push_through, schur };

/// Which feature block a single-view SVM was trained on.
enum class SvmView { first, second, concatenated };

namespace detail {

inline void check_labels(const Vector& y, const char* who) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) {
      std::ostringstream os;
      os << who << ": label " << i << " is " << y(i) << ", expected +1 or -1";
      throw InputError(os.str());
    }
  }
}

inline void check_square(const Matrix& k, Eigen::Index n, const char* who) {
  if (k.rows() != n || k.cols() != n) {
    std::ostringstream os;
    os << who << ": expected a " << n << "x" << n << " Gram matrix, got " << k.rows() << "x"
       << k.cols();
    throw InputError(os.str());
  }
}

inline QpOptions qp_options(const TrainOptions& t) {
  QpOptions o;
  o.tol = t.tol;
  o.max_iters = t.max_iters;
  o.start = t.start;
  return o;
}

inline void symmetrize(Matrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Single-view SVM

/// Solves min 1/2 l^T D l - 1^T l over [0, C]^n with D_ij = y_i y_j K_ij.
inline SvmModel train_svm(const Matrix& K, const Vector& y, double C,
                          const TrainOptions& opts = {}) {
  if (!(C > 0.0)) throw InputError("train_svm: C must be positive");
  detail::check_square(K, y.size(), "train_svm");
  detail::check_labels(y, "train_svm");
  const auto n = y.size();
  QpProblem qp;
  qp.H = y.asDiagonal() * K * y.asDiagonal();
  detail::symmetrize(qp.H);
  qp.c = Vector::Constant(n, -1.0);
  qp.lower = Vector::Zero(n);
  qp.upper = Vector::Constant(n, C);
  const auto sol = solve_box_qp(qp, detail::qp_options(opts));
  return {sol.x, y, C, sol.objective, sol.iterations};
}

/// Linear-kernel SVM on the rows of X; same dual as train_svm with K = X X^T.
inline SvmModel train_svm_linear(const Matrix& X, const Vector& y, double C,
                                 const TrainOptions& opts = {}) {
  if (!(C > 0.0)) throw InputError("train_svm: C must be positive");
  if (X.rows() != y.size()) throw InputError("train_svm: sample/label count mismatch");
  detail::check_labels(y, "train_svm");
  const auto n = y.size();
  LowRankQpProblem qp;
  qp.Z = y.asDiagonal() * X;
  qp.c = Vector::Constant(n, -1.0);
  qp.lower = Vector::Zero(n);
  qp.upper = Vector::Constant(n, C);
  const auto sol = solve_box_qp(qp, detail::qp_options(opts));
  return {sol.x, y, C, sol.objective, sol.iterations};
}

/// Kernel decision values sum_i y_i lambda_i K(x_i, x) given the cross-Gram K_cross
/// (rows = evaluation points, cols = training points).
inline Vector svm_decision(const SvmModel& m, const Matrix& K_cross) {
  return K_cross * m.labels.cwiseProduct(m.lambda);
}

// ---------------------------------------------------------------------------
// Multi-view SVM, Gram-matrix form

inline MvSvmMatrices assemble_mvsvm_matrices(const Matrix& K1, const Matrix& K2, double C2) {
  if (!(C2 >= 0.0)) throw InputError("assemble_mvsvm_matrices: C2 must be nonnegative");
  detail::check_square(K1, K1.rows(), "assemble_mvsvm_matrices");
  detail::check_square(K2, K1.rows(), "assemble_mvsvm_matrices");
  MvSvmMatrices m;
  m.Kt1 = K1 + 2.0 * C2 * K1 * K1;
  m.Kt2 = K2 + 2.0 * C2 * K2 * K2;
  detail::symmetrize(m.Kt1);
  detail::symmetrize(m.Kt2);
  m.Kb1 = 2.0 * C2 * K1 * K2;
  m.Kb2 = m.Kb1.transpose();
  if (C2 == 0.0) {
    m.M1 = m.Kt1;
    m.M2 = m.Kt2;
    return m;
  }
  const PsdFactor kt1(m.Kt1), kt2(m.Kt2);
  m.M1 = m.Kt1 - m.Kb1 * kt2.solve(m.Kb2);
  m.M2 = m.Kt2 - m.Kb2 * kt1.solve(m.Kb1);
  detail::symmetrize(m.M1);
  detail::symmetrize(m.M2);
  return m;
}

/// Dual Hessian [[A, B], [B^T, D]] of the (semi-supervised) multi-view SVM.
/// K1, K2 are (n+u) x (n+u) with the n labeled points first; y has length n.
inline Matrix mvsvm_dual_hessian(const Matrix& K1, const Matrix& K2, const Vector& y, double C2,
                                 MvSvmRoute route = MvSvmRoute::push_through) {
  const auto N = K1.rows();
  const auto n = y.size();
  detail::check_square(K1, N, "mvsvm_dual_hessian");
  detail::check_square(K2, N, "mvsvm_dual_hessian");
  if (n > N) throw InputError("mvsvm_dual_hessian: more labels than Gram rows");
  const Matrix Kn1 = K1.leftCols(n);
  const Matrix Kn2 = K2.leftCols(n);
  Matrix H(2 * n, 2 * n);

  if (route == MvSvmRoute::schur) {
    const auto mats = assemble_mvsvm_matrices(K1, K2, C2);
    const PsdFactor m1(mats.M1), m2(mats.M2);
    Matrix A = Kn1.transpose() * m1.solve(Kn1);
    Matrix D = Kn2.transpose() * m2.solve(Kn2);
    Matrix B = Matrix::Zero(n, n);
    if (C2 > 0.0) {
      const PsdFactor kt2(mats.Kt2);
      B = Kn1.transpose() * m1.solve(mats.Kb1 * kt2.solve(Kn2));
    }
    detail::symmetrize(A);
    detail::symmetrize(D);
    H << A, B, B.transpose(), D;
  } else {
    Matrix jk(N, 2 * n);  // J K_b E = [K_n1, -K_n2]
    jk << Kn1, -Kn2;
    H.setZero();
    H.topLeftCorner(n, n) = K1.topLeftCorner(n, n);
    H.bottomRightCorner(n, n) = K2.topLeftCorner(n, n);
    if (C2 > 0.0) {
      Matrix nm = Matrix::Identity(N, N) + 2.0 * C2 * (K1 + K2);
      detail::symmetrize(nm);
      const PsdFactor f(nm);
      H.noalias() -= 2.0 * C2 * jk.transpose() * f.solve(jk);
    }
    detail::symmetrize(H);
  }
  Vector yy(2 * n);
  yy << y, y;
  H = yy.asDiagonal() * H * yy.asDiagonal();
  detail::symmetrize(H);
  return H;
}

/// Recovers (alpha1, alpha2) from the dual variables.
inline std::pair<Vector, Vector> mvsvm_recover_alpha(const Matrix& K1, const Matrix& K2,
                                                     const Vector& y, const Vector& lambda1,
                                                     const Vector& lambda2, double C2,
                                                     MvSvmRoute route = MvSvmRoute::push_through) {
  const auto N = K1.rows();
  const auto n = y.size();
  const Vector yl1 = y.cwiseProduct(lambda1);
  const Vector yl2 = y.cwiseProduct(lambda2);
  const Vector L1 = K1.leftCols(n) * yl1;  // Lambda_1
  const Vector L2 = K2.leftCols(n) * yl2;
  if (route == MvSvmRoute::schur) {
    const auto mats = assemble_mvsvm_matrices(K1, K2, C2);
    const PsdFactor m1(mats.M1), m2(mats.M2);
    if (C2 == 0.0) return {m1.solve(L1), m2.solve(L2)};
    const PsdFactor kt1(mats.Kt1), kt2(mats.Kt2);
    Vector a1 = m1.solve(mats.Kb1 * kt2.solve(L2) + L1);
    Vector a2 = m2.solve(mats.Kb2 * kt1.solve(L1) + L2);
    return {std::move(a1), std::move(a2)};
  }
  Vector a1 = Vector::Zero(N), a2 = Vector::Zero(N);
  a1.head(n) = yl1;
  a2.head(n) = yl2;
  if (C2 > 0.0) {
    Matrix nm = Matrix::Identity(N, N) + 2.0 * C2 * (K1 + K2);
    detail::symmetrize(nm);
    const Vector s = PsdFactor(nm).solve(L1 - L2);
    a1.noalias() -= 2.0 * C2 * s;
    a2.noalias() += 2.0 * C2 * s;
  }
  return {std::move(a1), std::move(a2)};
}

/// Semi-supervised multi-view SVM. K1, K2 are (n+u) x (n+u) Gram matrices over the
/// labeled points followed by the unlabeled points; the co-regularizer spans all n+u.
inline MvSvmModel train_smvsvm(const Matrix& K1, const Matrix& K2, const Vector& y,
                               std::size_t n, std::size_t u, double C1, double C2,
                               const TrainOptions& opts = {},
                               MvSvmRoute route = MvSvmRoute::push_through) {
  if (!(C1 > 0.0)) throw InputError("train_mvsvm: C1 must be positive");
  if (!(C2 >= 0.0)) throw InputError("train_mvsvm: C2 must be nonnegative");
  if (static_cast<std::size_t>(y.size()) != n)
    throw InputError("train_smvsvm: label vector length differs from n");
  const auto N = static_cast<Eigen::Index>(n + u);
  detail::check_square(K1, N, "train_smvsvm");
  detail::check_square(K2, N, "train_smvsvm");
  detail::check_labels(y, "train_mvsvm");

  QpProblem qp;
  qp.H = mvsvm_dual_hessian(K1, K2, y, C2, route);
  const auto nn = static_cast<Eigen::Index>(2 * n);
  qp.c = Vector::Constant(nn, -1.0);
  qp.lower = Vector::Zero(nn);
  qp.upper = Vector::Constant(nn, C1);
  const auto sol = solve_box_qp(qp, detail::qp_options(opts));

  MvSvmModel m;
  m.lambda1 = sol.x.head(static_cast<Eigen::Index>(n));
  m.lambda2 = sol.x.tail(static_cast<Eigen::Index>(n));
  std::tie(m.alpha1, m.alpha2) = mvsvm_recover_alpha(K1, K2, y, m.lambda1, m.lambda2, C2, route);
  m.labels = y;
  m.C1 = C1;
  m.C2 = C2;
  m.semi_supervised = u > 0;
  m.dual_objective = sol.objective;
  m.iterations = sol.iterations;
  return m;
}

inline MvSvmModel train_mvsvm(const Matrix& K1, const Matrix& K2, const Vector& y, double C1,
                              double C2, const TrainOptions& opts = {},
                              MvSvmRoute route = MvSvmRoute::push_through) {
  return train_smvsvm(K1, K2, y, static_cast<std::size_t>(y.size()), 0, C1, C2, opts, route);
}

/// Relative residual of K~_1 a_1 - K-_1 a_2 = Lambda_1 and K~_2 a_2 - K-_2 a_1 = Lambda_2.
inline double stationarity_residual(const MvSvmModel& m, const Matrix& K1, const Matrix& K2) {
  const auto n = m.labels.size();
  const Vector L1 = K1.leftCols(n) * m.labels.cwiseProduct(m.lambda1);
  const Vector L2 = K2.leftCols(n) * m.labels.cwiseProduct(m.lambda2);
  const Vector k1a1 = K1 * m.alpha1, k2a2 = K2 * m.alpha2;
  const Vector r1 = k1a1 + 2.0 * m.C2 * K1 * (k1a1 - k2a2) - L1;
  const Vector r2 = k2a2 - 2.0 * m.C2 * K2 * (k1a1 - k2a2) - L2;
  return std::max(r1.norm() / (1.0 + L1.norm()), r2.norm() / (1.0 + L2.norm()));
}

/// Primal objective F0 at (alpha1, alpha2) with the optimal slacks over the labeled points.
inline double mvsvm_primal_objective(const MvSvmModel& m, const Matrix& K1, const Matrix& K2) {
  const auto n = m.labels.size();
  const Vector k1a1 = K1 * m.alpha1, k2a2 = K2 * m.alpha2;
  const Vector diff = k1a1 - k2a2;
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    hinge += std::max(0.0, 1.0 - m.labels(i) * k1a1(i));
    hinge += std::max(0.0, 1.0 - m.labels(i) * k2a2(i));
  }
  return 0.5 * (m.alpha1.dot(k1a1) + m.alpha2.dot(k2a2)) + m.C2 * diff.squaredNorm() +
         m.C1 * hinge;
}

// ---------------------------------------------------------------------------
// Linear kernel, feature-space form

struct LinearMvSvm {
  MvSvmModel model;
  LinearWeights weights;
};

/// Linear (S)MvSVM on feature rows. X1, X2 hold the n labeled rows followed by any
/// unlabeled rows; y has length n. The dual Hessian is Z Z^T with
/// Z = Y X_b L^{-T}, where L L^T = I + 2 C2 X~^T X~ and X~ = [X1, -X2].
inline LinearMvSvm train_mvsvm_linear(const Matrix& X1, const Matrix& X2, const Vector& y,
                                      double C1, double C2, const TrainOptions& opts = {}) {
  if (!(C1 > 0.0)) throw InputError("train_mvsvm: C1 must be positive");
  if (!(C2 >= 0.0)) throw InputError("train_mvsvm: C2 must be nonnegative");
  if (X1.rows() != X2.rows()) throw InputError("train_mvsvm: views have different row counts");
  const auto N = X1.rows();
  const auto n = y.size();
  if (n > N) throw InputError("train_mvsvm: more labels than samples");
  detail::check_labels(y, "train_mvsvm");
  const auto d1 = X1.cols(), d2 = X2.cols(), D = d1 + d2;

  Matrix xt(N, D);  // x~ = [x1, -x2]
  xt << X1, -X2;
  Matrix P = Matrix::Identity(D, D);
  if (C2 > 0.0) {
    P.selfadjointView<Eigen::Lower>().rankUpdate(xt.transpose(), 2.0 * C2);
    P.triangularView<Eigen::StrictlyUpper>() = P.transpose();
  }
  const Eigen::LLT<Matrix> llt(P);
  if (llt.info() != Eigen::Success) throw SingularityError("train_mvsvm: I + 2 C2 X~^T X~ not positive definite", 0.0);

  // (Y X_b)^T, D x 2n
  Matrix yxbT = Matrix::Zero(D, 2 * n);
  yxbT.topLeftCorner(d1, n) = (y.asDiagonal() * X1.topRows(n)).transpose();
  yxbT.bottomRightCorner(d2, n) = (y.asDiagonal() * X2.topRows(n)).transpose();
  const Matrix zT = llt.matrixL().solve(yxbT);

  LowRankQpProblem qp;
  qp.Z = zT.transpose();
  qp.c = Vector::Constant(2 * n, -1.0);
  qp.lower = Vector::Zero(2 * n);
  qp.upper = Vector::Constant(2 * n, C1);
  const auto sol = solve_box_qp(qp, detail::qp_options(opts));

  LinearMvSvm out;
  auto& m = out.model;
  m.lambda1 = sol.x.head(n);
  m.lambda2 = sol.x.tail(n);
  m.labels = y;
  m.C1 = C1;
  m.C2 = C2;
  m.semi_supervised = N > n;
  m.dual_objective = sol.objective;
  m.iterations = sol.iterations;

  const Vector w = llt.matrixU().solve(Vector(zT * sol.x));
  out.weights.w1 = w.head(d1);
  out.weights.w2 = w.tail(d2);
  const Vector disagreement = xt * w;
  m.alpha1 = -2.0 * C2 * disagreement;
  m.alpha2 = 2.0 * C2 * disagreement;
  m.alpha1.head(n) += y.cwiseProduct(m.lambda1);
  m.alpha2.head(n) += y.cwiseProduct(m.lambda2);
  return out;
}

// ---------------------------------------------------------------------------
// Weights and prediction

/// w_1 = sum_i alpha1_i x1_i, w_2 = sum_i alpha2_i x2_i over all rows the model spans.
inline LinearWeights extract_linear_weights(const MvSvmModel& m, const Matrix& X1,
                                            const Matrix& X2) {
  if (X1.rows() != m.alpha1.size() || X2.rows() != m.alpha2.size())
    throw UsageError("extract_linear_weights: sample rows do not match the model's coefficients");
  return {X1.transpose() * m.alpha1, X2.transpose() * m.alpha2};
}

/// Single-view weight sum_i y_i lambda_i x_i placed in its view's slot. For the
/// concatenated view, X holds [x1, x2] rows and d1 splits the result.
inline LinearWeights extract_linear_weights(const SvmModel& m, const Matrix& X, SvmView view,
                                            Eigen::Index d1, Eigen::Index d2) {
  if (X.rows() != m.lambda.size())
    throw UsageError("extract_linear_weights: sample rows do not match the model's coefficients");
  const Vector w = X.transpose() * m.labels.cwiseProduct(m.lambda);
  LinearWeights out;
  switch (view) {
    case SvmView::first:
      if (w.size() != d1) throw UsageError("extract_linear_weights: view-1 width mismatch");
      out.w1 = w;
      out.w2 = Vector::Zero(d2);
      break;
    case SvmView::second:
      if (w.size() != d2) throw UsageError("extract_linear_weights: view-2 width mismatch");
      out.w1 = Vector::Zero(d1);
      out.w2 = w;
      break;
    case SvmView::concatenated:
      if (w.size() != d1 + d2) throw UsageError("extract_linear_weights: concatenated width mismatch");
      out.w1 = w.head(d1);
      out.w2 = w.tail(d2);
      break;
  }
  return out;
}

/// sign(w1^T x1 + w2^T x2), with sign(0) = +1.
inline int predict(const LinearWeights& w, const Vector& x1, const Vector& x2) {
  if (x1.size() != w.w1.size() || x2.size() != w.w2.size())
    throw InputError("predict: sample dimensions do not match the weights");
  return w.w1.dot(x1) + w.w2.dot(x2) >= 0.0 ? 1 : -1;
}

/// Fraction of rows whose predicted label differs from y.
inline double error_rate(const LinearWeights& w, const Matrix& X1, const Matrix& X2,
                         const Vector& y) {
  if (y.size() == 0) return 0.0;
  if (X1.cols() != w.w1.size() || X2.cols() != w.w2.size())
    throw InputError("error_rate: sample dimensions do not match the weights");
  const Vector score = X1 * w.w1 + X2 * w.w2;
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if ((score(i) >= 0.0 ? 1.0 : -1.0) != y(i)) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(y.size());
}

}  // namespace mvpac
