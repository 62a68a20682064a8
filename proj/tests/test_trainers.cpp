#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mvpac/errors.hpp"
#include "mvpac/linalg.hpp"
#include "mvpac/trainers.hpp"
#include "oracles.hpp"

using namespace mvpac;

namespace {

struct TwoViews {
  Matrix x1, x2;
  Vector y;
};

// n points, full-rank Gram matrices when n <= d.
TwoViews random_views(oracle::Gen& g, Eigen::Index n, Eigen::Index d1, Eigen::Index d2) {
  TwoViews t{g.matrix(n, d1), g.matrix(n, d2), g.labels(n)};
  t.y(0) = 1.0;
  if (n > 1) t.y(1) = -1.0;
  return t;
}

// Primal objective written out from the co-regularized formulation, independent of
// the library helper.
double primal_by_hand(const Matrix& K1, const Matrix& K2, const Vector& y, const Vector& a1,
                      const Vector& a2, double C1, double C2) {
  const Vector f1 = K1 * a1, f2 = K2 * a2;
  double slack = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    slack += std::max(0.0, 1.0 - y(i) * f1(i)) + std::max(0.0, 1.0 - y(i) * f2(i));
  double coreg = 0.0;
  for (Eigen::Index i = 0; i < f1.size(); ++i) coreg += (f1(i) - f2(i)) * (f1(i) - f2(i));
  return 0.5 * (a1.dot(f1) + a2.dot(f2)) + C1 * slack + C2 * coreg;
}

double min_eigenvalue(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// SVM

TEST(TrainSvm, TwoPointsOnTheLine) {
  Matrix x(2, 1);
  x << 1.0, -1.0;
  Vector y(2);
  y << 1.0, -1.0;
  const auto m = train_svm(oracle::naive_gram(x), y, 10.0);
  EXPECT_NEAR(m.lambda.sum(), 1.0, 1e-8);
  const auto w = extract_linear_weights(m, x, SvmView::first, 1, 0);
  EXPECT_NEAR(w.w1(0), 1.0, 1e-8);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(y(i) * w.w1(0) * x(i, 0), 1.0, 1e-8);
  const Vector dec = svm_decision(m, oracle::naive_gram(x));
  EXPECT_NEAR(dec(0), 1.0, 1e-8);
  EXPECT_NEAR(dec(1), -1.0, 1e-8);
}

TEST(TrainSvm, SameLabelBoxAndEnvelope) {
  oracle::Gen g(31);
  const Matrix x = g.matrix(12, 3);
  const Vector y = Vector::Ones(12);
  const double C = 0.7;
  const auto m = train_svm(oracle::naive_gram(x), y, C);
  EXPECT_GE(m.dual_objective, -12.0);
  EXPECT_GE(m.lambda.minCoeff(), 0.0);
  EXPECT_LE(m.lambda.maxCoeff(), C);
}

TEST(TrainSvm, SeparablePointsReachZeroTrainingError) {
  oracle::Gen g(32);
  const double theta = 0.7;
  const Vector u = (Vector(2) << std::cos(theta), std::sin(theta)).finished();
  Matrix x(20, 2);
  Vector y(20);
  for (int i = 0; i < 20; ++i) {
    Vector p = g.vector(2);
    const double side = p.dot(u);
    if (std::abs(side) < 0.2) p += (side >= 0 ? 0.3 : -0.3) * u;
    x.row(i) = p.transpose();
    y(i) = p.dot(u) >= 0 ? 1.0 : -1.0;
  }
  // Brute-force confirmation that some direction through the origin separates the set.
  bool separable = false;
  for (int k = 0; k < 36000 && !separable; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 36000.0;
    const Vector v = (Vector(2) << std::cos(a), std::sin(a)).finished();
    separable = ((x * v).cwiseProduct(y).array() > 0.0).all();
  }
  ASSERT_TRUE(separable);
  const auto m = train_svm_linear(x, y, 1e4);
  const auto w = extract_linear_weights(m, x, SvmView::first, 2, 0);
  EXPECT_EQ(error_rate(w, x, Matrix::Zero(20, 0), y), 0.0);
}

TEST(TrainSvm, LinearAndGramPathsAgree) {
  oracle::Gen g(33);
  const Matrix x = g.matrix(15, 20);
  const Vector y = g.labels(15);
  const auto a = train_svm(oracle::naive_gram(x), y, 0.3);
  const auto b = train_svm_linear(x, y, 0.3);
  EXPECT_LE((a.lambda - b.lambda).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(a.dual_objective, b.dual_objective, 1e-9);
}

TEST(TrainSvm, RejectsBadInputs) {
  const Matrix k = Matrix::Identity(2, 2);
  EXPECT_THROW(train_svm(k, Vector::Ones(2), 0.0), InputError);
  EXPECT_THROW(train_svm(k, Vector::Constant(2, 0.5), 1.0), InputError);
  EXPECT_THROW(train_svm(k, Vector::Ones(3), 1.0), InputError);
}

// ---------------------------------------------------------------------------
// MvSVM matrices

TEST(MvSvmMatrices, CoRegularizationOff) {
  oracle::Gen g(34);
  const auto t = random_views(g, 5, 6, 6);
  const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
  const auto m = assemble_mvsvm_matrices(K1, K2, 0.0);
  EXPECT_TRUE(m.Kt1.isApprox(K1));
  EXPECT_TRUE(m.Kt2.isApprox(K2));
  EXPECT_EQ(m.Kb1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(m.M1.isApprox(K1));
  EXPECT_TRUE(m.M2.isApprox(K2));
}

TEST(MvSvmMatrices, ScalarIdentityCase) {
  const Matrix I = Matrix::Identity(3, 3);
  const auto m = assemble_mvsvm_matrices(I, I, 0.5);
  EXPECT_LE((m.Kt1 - 2.0 * I).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((m.Kb1 - I).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((m.M1 - 1.5 * I).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((m.M2 - 1.5 * I).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MvSvmMatrices, SymmetryAndTransposeIdentities) {
  oracle::Gen g(35);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_views(g, 6, 8, 7);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C2 = g.uniform(0.01, 2.0);
    const auto m = assemble_mvsvm_matrices(K1, K2, C2);
    EXPECT_EQ(m.Kb1, m.Kb2.transpose());
    EXPECT_LE((m.M1 - m.M1.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((m.M2 - m.M2.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    const Matrix kt1 = K1 + 2 * C2 * K1 * K1, kb1 = 2 * C2 * K1 * K2;
    const Matrix kt2 = K2 + 2 * C2 * K2 * K2;
    const Matrix M1 = kt1 - kb1 * oracle::gauss_jordan_inverse(kt2) * kb1.transpose();
    EXPECT_LE((m.M1 - M1).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + M1.cwiseAbs().maxCoeff()));
  }
}

TEST(MvSvmMatrices, DualHessianIsPsdAndRoutesAgree) {
  oracle::Gen g(36);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_views(g, 7, 9, 8);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C2 = std::pow(10.0, g.uniform(-4.0, 1.0));
    const Matrix a = mvsvm_dual_hessian(K1, K2, t.y, C2, MvSvmRoute::push_through);
    const Matrix b = mvsvm_dual_hessian(K1, K2, t.y, C2, MvSvmRoute::schur);
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-8 * scale);
    EXPECT_GE(min_eigenvalue(a), -1e-8 * a.trace());

    // B from its transpose-identity form: (Y K2 M2^-1 Kb2 Kt2... ) recomputed by hand.
    const auto m = assemble_mvsvm_matrices(K1, K2, C2);
    const Matrix Y = t.y.asDiagonal();
    const Matrix Bt = Y * K2 * oracle::gauss_jordan_inverse(m.M2) * m.Kb2 *
                      oracle::gauss_jordan_inverse(m.Kt1) * K1 * Y;
    EXPECT_LE((b.topRightCorner(7, 7) - Bt.transpose()).cwiseAbs().maxCoeff(), 1e-8 * scale);
  }
}

// ---------------------------------------------------------------------------
// MvSVM

TEST(TrainMvSvm, DecouplesWhenC2IsZero) {
  oracle::Gen g(37);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_views(g, 8, 10, 10);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C1 = std::pow(10.0, g.uniform(-1.0, 1.0));
    const auto mv = train_mvsvm(K1, K2, t.y, C1, 0.0);
    const auto s1 = train_svm(K1, t.y, C1), s2 = train_svm(K2, t.y, C1);
    EXPECT_LE((mv.lambda1 - s1.lambda).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((mv.lambda2 - s2.lambda).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(TrainMvSvm, IdenticalViewsGiveIdenticalCoefficients) {
  oracle::Gen g(38);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_views(g, 3, 5, 5);
    const Matrix K = oracle::naive_gram(t.x1);
    const double C2 = std::pow(10.0, g.uniform(-2.0, 1.0));
    const auto m = train_mvsvm(K, K, t.y, 1.0, C2);
    EXPECT_LE((m.alpha1 - m.alpha2).cwiseAbs().maxCoeff(), 1e-6);
    const Vector gap = K * m.alpha1 - K * m.alpha2;
    EXPECT_LE(gap.squaredNorm(), 1e-10);
    const auto w = extract_linear_weights(m, t.x1, t.x1);
    EXPECT_LE((w.w1 - w.w2).cwiseAbs().maxCoeff(), 1e-6);
    // The combined classifier agrees with either view alone.
    for (int i = 0; i < 20; ++i) {
      const Vector x = g.vector(5);
      const int single = w.w1.dot(x) >= 0 ? 1 : -1;
      EXPECT_EQ(predict(w, x, x), single);
    }
  }
}

TEST(TrainMvSvm, StationarityOnRandomInstances) {
  oracle::Gen g(39);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = g.integer(2, 10);
    const auto t = random_views(g, n, g.integer(1, 12), g.integer(1, 12));
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C1 = std::pow(10.0, g.uniform(-2.0, 2.0));
    const double C2 = std::pow(10.0, g.uniform(-4.0, 1.0));
    const auto m = train_mvsvm(K1, K2, t.y, C1, C2);
    EXPECT_LE(stationarity_residual(m, K1, K2), 1e-6);
    EXPECT_LE(m.dual_objective, 0.0);
    EXPECT_GE(m.lambda1.minCoeff(), 0.0);
    EXPECT_LE(m.lambda1.maxCoeff(), C1);
    EXPECT_GE(m.lambda2.minCoeff(), 0.0);
    EXPECT_LE(m.lambda2.maxCoeff(), C1);
  }
}

TEST(TrainMvSvm, StrongDualityOnThreePoints) {
  oracle::Gen g(40);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = random_views(g, 3, 4, 4);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C1 = std::pow(10.0, g.uniform(-1.0, 1.0));
    const double C2 = std::pow(10.0, g.uniform(-2.0, 1.0));
    const auto m = train_mvsvm(K1, K2, t.y, C1, C2);
    const double primal = primal_by_hand(K1, K2, t.y, m.alpha1, m.alpha2, C1, C2);
    EXPECT_NEAR(primal, -m.dual_objective, 1e-5);
    EXPECT_NEAR(mvsvm_primal_objective(m, K1, K2), primal, 1e-10);
  }
}

TEST(TrainMvSvm, LinearPathMatchesGramPath) {
  oracle::Gen g(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_views(g, 12, 6, 5);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C2 = std::pow(10.0, g.uniform(-3.0, 1.0));
    const auto a = train_mvsvm(K1, K2, t.y, 1.0, C2);
    const auto b = train_mvsvm_linear(t.x1, t.x2, t.y, 1.0, C2);
    const auto wa = extract_linear_weights(a, t.x1, t.x2);
    EXPECT_LE((wa.w1 - b.weights.w1).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LE((wa.w2 - b.weights.w2).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_NEAR(a.dual_objective, b.model.dual_objective, 1e-8);
    EXPECT_LE(stationarity_residual(b.model, K1, K2), 1e-6);
  }
}

TEST(TrainMvSvm, RouteChoiceDoesNotChangeTheModel) {
  oracle::Gen g(42);
  const auto t = random_views(g, 6, 8, 8);
  const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
  const auto a = train_mvsvm(K1, K2, t.y, 2.0, 0.1, {}, MvSvmRoute::push_through);
  const auto b = train_mvsvm(K1, K2, t.y, 2.0, 0.1, {}, MvSvmRoute::schur);
  EXPECT_LE((a.alpha1 - b.alpha1).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((a.alpha2 - b.alpha2).cwiseAbs().maxCoeff(), 1e-6);
}

// ---------------------------------------------------------------------------
// SMvSVM

TEST(TrainSmvSvm, NoUnlabeledReducesToMvSvm) {
  oracle::Gen g(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_views(g, 6, 7, 7);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const auto a = train_mvsvm(K1, K2, t.y, 1.5, 0.3);
    const auto b = train_smvsvm(K1, K2, t.y, 6, 0, 1.5, 0.3);
    EXPECT_LE((a.lambda1 - b.lambda1).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((a.alpha1 - b.alpha1).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((a.alpha2 - b.alpha2).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_FALSE(b.semi_supervised);
  }
}

TEST(TrainSmvSvm, ZeroC2IgnoresUnlabeledPoints) {
  oracle::Gen g(44);
  const auto n = 5, u = 4;
  const auto t = random_views(g, n + u, 12, 12);
  const Vector y = t.y.head(n);
  const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
  const auto m = train_smvsvm(K1, K2, y, n, u, 1.0, 0.0);
  EXPECT_LE(m.alpha1.tail(u).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(m.alpha2.tail(u).cwiseAbs().maxCoeff(), 1e-12);
  const auto s1 = train_svm(K1.topLeftCorner(n, n), y, 1.0);
  const auto s2 = train_svm(K2.topLeftCorner(n, n), y, 1.0);
  EXPECT_LE((m.lambda1 - s1.lambda).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((m.lambda2 - s2.lambda).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(m.semi_supervised);
}

TEST(TrainSmvSvm, StationarityWithUnlabeledPoints) {
  oracle::Gen g(45);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_views(g, 5, 4, 3);
    const Vector y = t.y.head(3);
    const Matrix K1 = oracle::naive_gram(t.x1), K2 = oracle::naive_gram(t.x2);
    const double C2 = std::pow(10.0, g.uniform(-3.0, 1.0));
    const auto m = train_smvsvm(K1, K2, y, 3, 2, 1.0, C2);
    EXPECT_EQ(m.alpha1.size(), 5);
    EXPECT_LE(stationarity_residual(m, K1, K2), 1e-6);
    const auto lin = train_mvsvm_linear(t.x1, t.x2, y, 1.0, C2);
    const auto w = extract_linear_weights(m, t.x1, t.x2);
    EXPECT_LE((w.w1 - lin.weights.w1).cwiseAbs().maxCoeff(), 1e-5);
  }
}

// ---------------------------------------------------------------------------
// Weights and prediction

TEST(Weights, SingleCoefficient) {
  MvSvmModel m;
  m.alpha1 = Vector::Unit(2, 0);
  m.alpha2 = Vector::Zero(2);
  Matrix x1(2, 2);
  x1 << 2, 0, 5, 5;
  const auto w = extract_linear_weights(m, x1, Matrix::Zero(2, 3));
  EXPECT_EQ(w.w1, (Vector(2) << 2, 0).finished());
  EXPECT_EQ(w.w2, Vector::Zero(3));
  EXPECT_THROW(extract_linear_weights(m, Matrix::Zero(3, 2), Matrix::Zero(2, 3)), UsageError);
}

TEST(Weights, ConcatenatedSvmSplitsAcrossViews) {
  SvmModel m;
  m.lambda = Vector::Ones(1);
  m.labels = Vector::Ones(1);
  Matrix x(1, 3);
  x << 1, 2, 3;
  const auto w = extract_linear_weights(m, x, SvmView::concatenated, 1, 2);
  EXPECT_EQ(w.w1.size(), 1);
  EXPECT_EQ(w.w2, (Vector(2) << 2, 3).finished());
  EXPECT_NEAR(w.concatenated_norm(), std::sqrt(14.0), 1e-15);
  EXPECT_THROW(extract_linear_weights(m, x, SvmView::first, 1, 2), UsageError);
}

TEST(Predict, SignWithTieBreak) {
  LinearWeights w{(Vector(1) << 0.3).finished(), (Vector(1) << 1.0).finished()};
  EXPECT_EQ(predict(w, Vector::Ones(1), Vector::Zero(1)), 1);
  EXPECT_EQ(predict(w, Vector::Zero(1), Vector::Zero(1)), 1);
  EXPECT_EQ(predict(w, Vector::Ones(1), -Vector::Ones(1)), -1);
  EXPECT_THROW(predict(w, Vector::Ones(2), Vector::Ones(1)), InputError);
}
