#pragma once

// Box-constrained convex quadratic programming:
//
//   minimize  1/2 x^T H x + c^T x   subject to  lower <= x <= upper
//
// The solver interleaves three monotone steps per iteration: a projected-gradient arc
// search, a cyclic coordinate-descent sweep, and a Newton step restricted to the
// currently free coordinates. Each step is accepted only if its exact quadratic gain
// is nonpositive, so the objective never increases.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "mvpac/errors.hpp"
#include "mvpac/linalg.hpp"

namespace mvpac {

struct QpProblem {
  Matrix H;  // symmetric PSD, N x N
  Vector c;
  Vector lower;
  Vector upper;
};

/// Same problem with H = Z Z^T given by its N x r factor. Iterations cost O(N r)
/// instead of O(N^2), which is what makes linear-kernel SVM duals cheap.
struct LowRankQpProblem {
  Matrix Z;
  Vector c;
  Vector lower;
  Vector upper;
};

struct QpSolution {
  Vector x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double kkt_residual = 0.0;
};

struct QpOptions {
  double tol = 1e-8;
  std::size_t max_iters = 0;  // 0 selects 200 * N
  std::optional<Vector> start;
  /// Called after every iteration with (iteration, objective).
  std::function<void(std::size_t, double)> on_iteration;
};

/// Projected-gradient KKT residual of x for gradient g = Hx + c.
inline double kkt_residual(const Vector& x, const Vector& g, const Vector& lower,
                           const Vector& upper) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r;
    if (lower(i) == upper(i)) {
      r = 0.0;
    } else if (x(i) <= lower(i)) {
      r = std::max(0.0, -g(i));
    } else if (x(i) >= upper(i)) {
      r = std::max(0.0, g(i));
    } else {
      r = std::abs(g(i));
    }
    worst = std::max(worst, r);
  }
  return worst;
}

/// Deterministic feasible start: 0 where lower == 0, otherwise the box midpoint
/// (or the projection of 0 when a side is unbounded).
inline Vector default_start(const Vector& lower, const Vector& upper) {
  Vector x(lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (lower(i) == 0.0) {
      x(i) = 0.0;
    } else if (std::isfinite(lower(i)) && std::isfinite(upper(i))) {
      x(i) = 0.5 * (lower(i) + upper(i));
    } else {
      x(i) = std::clamp(0.0, lower(i), upper(i));
    }
  }
  return x;
}

namespace detail {

// Relative ridge added to the free block before the Newton solve.
inline constexpr double kNewtonRidge = 1e-12;

// Step sizes tried along the projected-gradient arc (Cauchy step times 4^j).
inline constexpr int kArcTrials = 6;

// Hessian policies. Both track enough state to give (Hx)_i cheaply while x changes.

class DenseHessian {
 public:
  explicit DenseHessian(const Matrix& h) : h_(h) {}

  Eigen::Index size() const { return h_.rows(); }
  double diag(Eigen::Index i) const { return h_(i, i); }
  void reset(const Vector& x) { hx_ = h_ * x; }
  double hx(Eigen::Index i) const { return hx_(i); }
  void coord_step(Eigen::Index i, double delta) { hx_.noalias() += delta * h_.col(i); }
  Vector gradient(const Vector& c) const { return hx_ + c; }
  double objective(const Vector& x, const Vector& c) const {
    return 0.5 * x.dot(hx_) + c.dot(x);
  }

  using Prepared = Vector;  // H d
  Prepared prepare(const Vector& d) const { return h_ * d; }
  static double curvature(const Vector& d, const Prepared& p) { return d.dot(p); }
  void commit(const Prepared& p, double t) { hx_.noalias() += t * p; }

  /// -(H_FF + ridge I)^{-1} g_F with ridge = 1e-12 * max diag(H_FF).
  Vector newton_direction(const std::vector<Eigen::Index>& f, const Vector& gf) const {
    const auto k = static_cast<Eigen::Index>(f.size());
    Matrix b(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index c = 0; c < k; ++c) b(a, c) = h_(f[a], f[c]);
    b.diagonal().array() += kNewtonRidge * std::max(b.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    const Eigen::LDLT<Matrix> ldlt(b);
    if (ldlt.info() != Eigen::Success) return {};
    return ldlt.solve(-gf);
  }

 private:
  const Matrix& h_;
  Vector hx_;
};

class LowRankHessian {
 public:
  // Z is stored transposed so that the row z_i used by coordinate steps is contiguous.
  explicit LowRankHessian(const Matrix& z) : zt_(z.transpose()), diag_(z.rowwise().squaredNorm()) {}

  Eigen::Index size() const { return zt_.cols(); }
  double diag(Eigen::Index i) const { return diag_(i); }
  void reset(const Vector& x) { v_.noalias() = zt_ * x; }
  double hx(Eigen::Index i) const { return zt_.col(i).dot(v_); }
  void coord_step(Eigen::Index i, double delta) { v_.noalias() += delta * zt_.col(i); }
  Vector gradient(const Vector& c) const { return zt_.transpose() * v_ + c; }
  double objective(const Vector& x, const Vector& c) const {
    return 0.5 * v_.squaredNorm() + c.dot(x);
  }

  using Prepared = Vector;  // Z^T d
  Prepared prepare(const Vector& d) const { return zt_ * d; }
  static double curvature(const Vector&, const Prepared& p) { return p.squaredNorm(); }
  void commit(const Prepared& p, double t) { v_.noalias() += t * p; }

  /// -(Z_F Z_F^T + e I)^{-1} g_F, e = 1e-12 * max diag. With more free coordinates
  /// than columns of Z, the Woodbury form only factors an r x r matrix:
  ///   (Z_F Z_F^T + e I)^{-1} = (I - Z_F (e I + Z_F^T Z_F)^{-1} Z_F^T) / e.
  Vector newton_direction(const std::vector<Eigen::Index>& f, const Vector& gf) const {
    const auto k = static_cast<Eigen::Index>(f.size());
    const auto r = zt_.rows();
    Matrix zf(r, k);  // Z_F^T
    double top = 1e-300;
    for (Eigen::Index a = 0; a < k; ++a) {
      zf.col(a) = zt_.col(f[static_cast<std::size_t>(a)]);
      top = std::max(top, diag_(f[static_cast<std::size_t>(a)]));
    }
    const double e = kNewtonRidge * top;
    if (k <= r) {
      Matrix b = zf.transpose() * zf;
      b.diagonal().array() += e;
      const Eigen::LDLT<Matrix> ldlt(b);
      if (ldlt.info() != Eigen::Success) return {};
      return ldlt.solve(-gf);
    }
    Matrix inner = zf * zf.transpose();
    inner.diagonal().array() += e;
    const Eigen::LDLT<Matrix> ldlt(inner);
    if (ldlt.info() != Eigen::Success) return {};
    const Vector proj = zf * gf;
    return -(gf - zf.transpose() * ldlt.solve(proj)) / e;
  }

 private:
  Matrix zt_;
  Vector diag_;
  Vector v_;
};

inline void validate_box(Eigen::Index n, const Vector& c, const Vector& lower,
                         const Vector& upper) {
  if (c.size() != n || lower.size() != n || upper.size() != n)
    throw InputError("solve_box_qp: inconsistent problem dimensions");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lower(i) <= upper(i))) {
      std::ostringstream os;
      os << "solve_box_qp: lower > upper at coordinate " << i;
      throw InputError(os.str());
    }
  }
  if (!c.allFinite()) throw InputError("solve_box_qp: non-finite linear term");
}

// Largest free-set size for which the Newton step is attempted.
inline constexpr std::size_t kNewtonCap = 2000;

template <typename Hessian>
QpSolution solve(Hessian& h, const Vector& c, const Vector& lower, const Vector& upper,
                 const QpOptions& opts) {
  const Eigen::Index n = h.size();
  if (!(opts.tol > 0.0)) throw InputError("solve_box_qp: tol must be positive");
  const std::size_t max_iters =
      opts.max_iters > 0 ? opts.max_iters : 200 * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));

  Vector x = opts.start ? *opts.start : default_start(lower, upper);
  if (x.size() != n) throw InputError("solve_box_qp: start point has wrong dimension");
  x = x.cwiseMax(lower).cwiseMin(upper);
  h.reset(x);

  auto clamp_to = [&](Eigen::Index i, double v) { return std::clamp(v, lower(i), upper(i)); };

  std::size_t iter = 0;
  double residual = 0.0;
  for (;;) {
    Vector g = h.gradient(c);
    residual = kkt_residual(x, g, lower, upper);
    if (residual <= opts.tol) break;
    if (iter >= max_iters) {
      std::ostringstream os;
      os << "solve_box_qp: no convergence after " << iter << " iterations (KKT residual "
         << residual << ", tol " << opts.tol << ")";
      throw ConvergenceError(os.str(), x, residual, iter);
    }
    ++iter;

    // 1. Projected gradient. Along the arc x(a) = P(x - a g) the objective is evaluated
    //    exactly at a geometric ladder of step sizes starting from the Cauchy step; long
    //    steps let many coordinates reach their bounds in one iteration.
    {
      const auto pg = h.prepare(g);
      const double gg = g.squaredNorm();
      const double ghg = Hessian::curvature(g, pg);
      double alpha = (ghg > 0.0 ? gg / ghg : 1.0) / 4.0;
      double best_gain = 0.0;
      Vector best_step;
      std::optional<typename Hessian::Prepared> best_prepared;
      for (int j = 0; j < kArcTrials; ++j, alpha *= 4.0) {
        Vector step(n);
        for (Eigen::Index i = 0; i < n; ++i) step(i) = clamp_to(i, x(i) - alpha * g(i)) - x(i);
        auto ps = h.prepare(step);
        const double gain = g.dot(step) + 0.5 * Hessian::curvature(step, ps);
        if (gain < best_gain) {
          best_gain = gain;
          best_step = std::move(step);
          best_prepared = std::move(ps);
        }
      }
      if (best_prepared) {
        x.noalias() += best_step;
        h.commit(*best_prepared, 1.0);
        x = x.cwiseMax(lower).cwiseMin(upper);
      }
    }

    // 2. Cyclic coordinate descent. Zero-curvature coordinates move to the bound the
    //    gradient points at, or stay put when the gradient vanishes.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lower(i) == upper(i)) continue;
      const double gi = h.hx(i) + c(i);
      const double hii = h.diag(i);
      double target;
      if (hii > 0.0) {
        target = clamp_to(i, x(i) - gi / hii);
      } else if (gi > 0.0) {
        target = lower(i);
      } else if (gi < 0.0) {
        target = upper(i);
      } else {
        continue;
      }
      if (!std::isfinite(target)) continue;
      const double delta = target - x(i);
      if (delta != 0.0) {
        x(i) = target;
        h.coord_step(i, delta);
      }
    }

    // 3. Newton step on the strictly free coordinates. A tiny ridge keeps the free block
    //    factorizable; when it is singular the step runs along its null space to a bound.
    {
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i)
        if (lower(i) < x(i) && x(i) < upper(i)) free.push_back(i);
      if (!free.empty() && free.size() <= kNewtonCap) {
        const Vector gnow = h.gradient(c);
        const auto k = static_cast<Eigen::Index>(free.size());
        Vector gf(k);
        for (Eigen::Index a = 0; a < k; ++a) gf(a) = gnow(free[a]);
        const Vector df = h.newton_direction(free, gf);
        if (df.size() == k && df.allFinite()) {
          Vector d = Vector::Zero(n);
          double t_max = std::numeric_limits<double>::infinity();
          Eigen::Index blocking = -1;
          for (Eigen::Index a = 0; a < k; ++a) {
            const auto i = free[a];
            d(i) = df(a);
            double lim = std::numeric_limits<double>::infinity();
            if (df(a) > 0.0) lim = (upper(i) - x(i)) / df(a);
            if (df(a) < 0.0) lim = (lower(i) - x(i)) / df(a);
            if (lim < t_max) {
              t_max = lim;
              blocking = i;
            }
          }
          // Candidate A: the full step projected onto the box, which can move many
          // coordinates onto bounds at once. Candidate B: the exact line search truncated
          // at the first bound. Take whichever lowers the objective more.
          Vector dp(n);
          for (Eigen::Index i = 0; i < n; ++i) dp(i) = clamp_to(i, x(i) + d(i)) - x(i);
          const auto pp = h.prepare(dp);
          const double projected_gain = gnow.dot(dp) + 0.5 * Hessian::curvature(dp, pp);
          const double slope = gnow.dot(d);
          const auto pd = h.prepare(d);
          const double curv = Hessian::curvature(d, pd);
          double t = 0.0;
          if (slope < 0.0) t = std::min(curv > 0.0 ? -slope / curv : t_max, t_max);
          if (!std::isfinite(t)) t = 0.0;
          const double truncated_gain = t * slope + 0.5 * t * t * curv;
          if (projected_gain < 0.0 && projected_gain < truncated_gain) {
            x.noalias() += dp;
            h.commit(pp, 1.0);
            x = x.cwiseMax(lower).cwiseMin(upper);
          } else if (t > 0.0) {
            x.noalias() += t * d;
            h.commit(pd, t);
            if (t == t_max && blocking >= 0) x(blocking) = d(blocking) > 0 ? upper(blocking) : lower(blocking);
            x = x.cwiseMax(lower).cwiseMin(upper);
          }
        }
      }
    }

    // Clamping above perturbs x by rounding only; resynchronize the cached product
    // periodically so it cannot drift.
    if (iter % 16 == 0) h.reset(x);
    if (opts.on_iteration) opts.on_iteration(iter, h.objective(x, c));
  }

  h.reset(x);
  QpSolution sol;
  sol.objective = h.objective(x, c);
  sol.x = std::move(x);
  sol.iterations = iter;
  sol.kkt_residual = residual;
  return sol;
}

}  // namespace detail

inline double qp_objective(const QpProblem& p, const Vector& x) {
  return 0.5 * x.dot(p.H * x) + p.c.dot(x);
}

inline QpSolution solve_box_qp(const QpProblem& problem, const QpOptions& opts) {
  const auto n = problem.H.rows();
  if (problem.H.cols() != n) throw InputError("solve_box_qp: H is not square");
  detail::validate_box(n, problem.c, problem.lower, problem.upper);
  const double scale = std::max(1.0, problem.H.cwiseAbs().maxCoeff());
  if (!problem.H.allFinite()) throw InputError("solve_box_qp: non-finite H");
  if ((problem.H - problem.H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InputError("solve_box_qp: H is not symmetric");
  detail::DenseHessian h(problem.H);
  return detail::solve(h, problem.c, problem.lower, problem.upper, opts);
}

inline QpSolution solve_box_qp(const QpProblem& problem, double tol = 1e-8,
                               std::size_t max_iters = 0) {
  QpOptions opts;
  opts.tol = tol;
  opts.max_iters = max_iters;
  return solve_box_qp(problem, opts);
}

inline QpSolution solve_box_qp(const LowRankQpProblem& problem, const QpOptions& opts) {
  detail::validate_box(problem.Z.rows(), problem.c, problem.lower, problem.upper);
  if (!problem.Z.allFinite()) throw InputError("solve_box_qp: non-finite factor");
  detail::LowRankHessian h(problem.Z);
  return detail::solve(h, problem.c, problem.lower, problem.upper, opts);
}

inline QpSolution solve_box_qp(const LowRankQpProblem& problem, double tol = 1e-8,
                               std::size_t max_iters = 0) {
  QpOptions opts;
  opts.tol = tol;
  opts.max_iters = max_iters;
  return solve_box_qp(problem, opts);
}

}  // namespace mvpac
