#pragma once

// PAC-Bayes bounds for (multi-view) linear classifiers.
//
// Every bound has the shape  KL+(E^_{Q,S} || E_{Q,D}) <= B,  where the posterior is
// Q = N(mu w, I) with ||w|| = 1 and B is a complexity budget built from a KL term, a
// confidence term and, for the data-dependent priors, McDiarmid-style deviation terms.
// A bound is turned into a risk certificate by inverting KL+ at the empirical
// stochastic error.
//
// Conventions: samples are the augmented, jointly scaled concatenations x = [x1; x2]
// (so R = sup ||x|| = 1), and x~ = [x1; -x2]. d is the concatenated dimension.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvpac/errors.hpp"
#include "mvpac/linalg.hpp"

namespace mvpac {

// ---------------------------------------------------------------------------
// Types

struct PosteriorSpec {
  Vector w;  // unit norm
  double mu = 1.0;
};

/// Labeled samples in concatenated form. Rows of x are [x1, x2]; the first d1
/// columns belong to view 1. For single-view bounds d1 == x.cols().
struct LabeledSet {
  Matrix x;
  Vector y;
  Eigen::Index d1 = 0;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

/// Rows of x~ = [x1, -x2] for a concatenated sample matrix.
inline Matrix signed_concatenation(const Matrix& x, Eigen::Index d1) {
  Matrix xt = x;
  xt.rightCols(x.cols() - d1) *= -1.0;
  return xt;
}

struct BoundConfig {
  double delta = 0.05;
  double sigma = 100.0;
  double eta = 1.0;
  std::vector<double> mu_grid = {0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 50, 100};
  double r_fraction = 0.2;
  double R = 1.0;
};

/// Additive pieces of a budget B = numerator / denominator.
struct KlBudget {
  double numerator = 0.0;
  double denominator = 1.0;
  bool vacuous = false;
  std::map<std::string, double> components;

  double value() const {
    return vacuous ? std::numeric_limits<double>::infinity() : numerator / denominator;
  }
};

struct BoundReport {
  std::string bound_name;
  double kl_numerator = 0.0;
  double stochastic_error = 0.0;
  double risk_bound = 1.0;
  double deterministic_risk_bound = 2.0;  // 2 * risk_bound, uncapped
  double mu_used = 0.0;
  bool vacuous = false;
  /// The bound's confidence statement fixes mu and eta in advance; selecting mu on a
  /// grid afterwards is not covered by it.
  bool grid_selected_mu = false;
  std::map<std::string, double> components;

  double reported_deterministic() const { return std::min(1.0, deterministic_risk_bound); }
};

struct EmpiricalAggregates {
  double f_m = 0.0;        // mean |I + x~x~^T/s^2|^{1/d}
  double f_tilde = 0.0;    // mean ( [x~^T x~ + mu^2 (w^T x~)^2]/s^2 - ln|I + x~x~^T/s^2| )
  double H_m = 0.0;        // mean [x~^T x~ + mu^2 (w^T x~)^2]
  double H_hat_m = 0.0;    // mean [x~^T x~ - 2 eta mu s^2 y w^T x + mu^2 (w^T x~)^2]
  double H_tilde_m = 0.0;  // mean ( that / s^2 - ln|I + x~x~^T/s^2| )
  double S_bar_m = 0.0;    // mean (-eta mu y w^T x)
  Vector w_hat_p;          // mean y x
  double R = 1.0;
  Eigen::Index d = 0;
  Eigen::Index m = 0;
};

// ---------------------------------------------------------------------------
// Stochastic error

/// Upper Gaussian tail, integral from x to infinity of the standard normal density.
inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// y w^T x / ||x||.
inline double normalized_margin(const Vector& x, double y, const Vector& w) {
  const double norm = x.norm();
  if (!(norm > 0.0)) throw InputError("normalized_margin: zero feature vector");
  if (x.size() != w.size()) throw InputError("normalized_margin: dimension mismatch");
  return y * w.dot(x) / norm;
}

/// Mean over the sample of the Gaussian tail at mu * margin.
inline double stochastic_error(const LabeledSet& s, const PosteriorSpec& q) {
  if (s.size() == 0) throw InputError("stochastic_error: empty sample");
  if (s.dim() != q.w.size()) throw InputError("stochastic_error: dimension mismatch");
  const Vector proj = s.x * q.w;
  const Vector norms = s.x.rowwise().norm();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(norms(i) > 0.0)) throw InputError("normalized_margin: zero feature vector");
    sum += gaussian_tail(q.mu * s.y(i) * proj(i) / norms(i));
  }
  return sum / static_cast<double>(s.size());
}

/// Plain 0-1 error of sign(w^T x) with sign(0) = +1.
inline double empirical_error(const LabeledSet& s, const Vector& w) {
  const Vector proj = s.x * w;
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if ((proj(i) >= 0.0 ? 1.0 : -1.0) != s.y(i)) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(std::max<Eigen::Index>(s.size(), 1));
}

// ---------------------------------------------------------------------------
// KL+ and its inversion

/// q ln(q/p) + (1-q) ln((1-q)/(1-p)) for p > q, else 0; 0 ln 0 = 0.
inline double kl_plus(double q, double p) {
  if (!(p > q)) return 0.0;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  double v = 0.0;
  if (q > 0.0) v += q * std::log(q / p);
  if (q < 1.0) v += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  return std::max(v, 0.0);
}

inline constexpr double kKlInversionCap = 1.0 - 1e-15;

namespace detail {

// KL+(q || p) with p given through s = -ln(1 - p), which keeps the (1-q) ln((1-q)/(1-p))
// branch exact when p is close to 1.
inline double kl_plus_tail(double q, double s) {
  const double p = -std::expm1(-s);
  if (!(p > q)) return 0.0;
  double v = (1.0 - q) * s;
  if (q < 1.0) v += (1.0 - q) * std::log1p(-q);
  if (q > 0.0) v += q * std::log(q / p);
  return std::max(v, 0.0);
}

}  // namespace detail

/// Largest p in [q_hat, 1 - 1e-15] with KL+(q_hat || p) <= B, by bisection on -ln(1 - p).
inline double invert_kl(double q_hat, double B) {
  if (!(B >= 0.0)) throw InputError("invert_kl: budget must be nonnegative");
  q_hat = std::clamp(q_hat, 0.0, 1.0);
  if (B == 0.0 || q_hat >= kKlInversionCap) return q_hat;
  const double s_cap = -std::log1p(-kKlInversionCap);
  if (!std::isfinite(B) || detail::kl_plus_tail(q_hat, s_cap) <= B) return kKlInversionCap;
  double lo = -std::log1p(-q_hat), hi = s_cap;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::kl_plus_tail(q_hat, mid) <= B)
      lo = mid;
    else
      hi = mid;
  }
  // Settle on the largest representable p whose KL+ stays within budget.
  double p = std::max(q_hat, -std::expm1(-lo));
  for (int k = 0; k < 64 && p > q_hat && kl_plus(q_hat, p) > B; ++k) p = std::nextafter(p, 0.0);
  for (int k = 0; k < 64; ++k) {
    const double up = std::nextafter(p, 1.0);
    if (up > kKlInversionCap || kl_plus(q_hat, up) > B) break;
    p = up;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Empirical aggregates

inline void require_scaled(const Matrix& x, double R, const char* who) {
  const double worst = x.rows() > 0 ? x.rowwise().norm().maxCoeff() : 0.0;
  if (worst > R + 1e-9) {
    throw ContractError(std::string(who) + ": sample norm " + std::to_string(worst) +
                        " exceeds R = " + std::to_string(R) + "; scale the data first");
  }
}

inline EmpiricalAggregates empirical_aggregates(const LabeledSet& s, const Vector& w, double mu,
                                                double sigma, double eta, double R = 1.0) {
  if (s.size() == 0) throw InputError("empirical_aggregates: empty sample");
  if (!(sigma > 0.0)) throw InputError("empirical_aggregates: sigma must be positive");
  if (s.dim() != w.size()) throw InputError("empirical_aggregates: dimension mismatch");
  require_scaled(s.x, R, "empirical_aggregates");
  const auto m = s.size();
  const auto d = s.dim();
  const double s2 = sigma * sigma;
  const Matrix xt = signed_concatenation(s.x, s.d1);
  const Vector wxt = xt * w;
  const Vector wx = s.x * w;

  EmpiricalAggregates a;
  a.R = R;
  a.d = d;
  a.m = m;
  a.w_hat_p = s.x.transpose() * s.y / static_cast<double>(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sq = xt.row(i).squaredNorm();
    const double logdet = rank1_logdet(xt.row(i).transpose(), sigma);
    const double agree = mu * mu * wxt(i) * wxt(i);
    const double align = 2.0 * eta * mu * s2 * s.y(i) * wx(i);
    a.f_m += std::exp(logdet / static_cast<double>(d));
    a.H_m += sq + agree;
    a.f_tilde += (sq + agree) / s2 - logdet;
    a.H_hat_m += sq - align + agree;
    a.H_tilde_m += (sq - align + agree) / s2 - logdet;
    a.S_bar_m += -eta * mu * s.y(i) * wx(i);
  }
  const double inv = 1.0 / static_cast<double>(m);
  a.f_m *= inv;
  a.H_m *= inv;
  a.f_tilde *= inv;
  a.H_hat_m *= inv;
  a.H_tilde_m *= inv;
  a.S_bar_m *= inv;
  return a;
}

// ---------------------------------------------------------------------------
// Budgets

namespace detail {

inline double mcdiarmid_width(double delta_split, Eigen::Index m) {
  return std::sqrt(std::log(delta_split) / (2.0 * static_cast<double>(m)));
}

// -(d/2) ln [ f_m - (((R/s)^2 + 1)^{1/d} - 1) * width ]_+ ; nullopt when the bracket is 0.
inline std::optional<double> logdet_bracket(const EmpiricalAggregates& a, double sigma,
                                            double width) {
  const double d = static_cast<double>(a.d);
  const double spread = std::pow((a.R / sigma) * (a.R / sigma) + 1.0, 1.0 / d) - 1.0;
  const double bracket = a.f_m - spread * width;
  if (!(bracket > 0.0)) return std::nullopt;
  return -0.5 * d * std::log(bracket);
}

// 1/2 ( eta R / sqrt(m) (2 + sqrt(2 ln(k/delta))) + ||eta w^_p - mu w|| + mu )^2
inline double center_mismatch(const EmpiricalAggregates& a, const Vector& w, double mu,
                              double eta, double ln_k_over_delta) {
  const double spread =
      eta * a.R / std::sqrt(static_cast<double>(a.m)) * (2.0 + std::sqrt(2.0 * ln_k_over_delta));
  const double gap = (eta * a.w_hat_p - mu * w).norm();
  const double t = spread + gap + mu;
  return 0.5 * t * t;
}

}  // namespace detail

/// Single-view budget (mu^2/2 + ln((m+1)/delta)) / m.
inline KlBudget bound_pb(Eigen::Index m, double mu, double delta) {
  if (m < 1) throw InputError("bound_pb: m must be at least 1");
  KlBudget b;
  b.components["kl"] = 0.5 * mu * mu;
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / delta);
  b.numerator = b.components["kl"] + b.components["confidence"];
  b.denominator = static_cast<double>(m);
  return b;
}

/// Multi-view bound with the view-agreement prior centered at the origin, controlled
/// through the concave |.|^{1/d} inequality (dimension-dependent).
inline KlBudget bound_mvpb1(const EmpiricalAggregates& a, double mu, double sigma, double delta) {
  const auto m = a.m;
  const double width = detail::mcdiarmid_width(3.0 / delta, m);
  KlBudget b;
  b.denominator = static_cast<double>(m);
  const auto logdet = detail::logdet_bracket(a, sigma, width);
  b.components["agreement"] = a.H_m / (2.0 * sigma * sigma);
  b.components["deviation"] = (1.0 + mu * mu) * a.R * a.R / (2.0 * sigma * sigma) * width;
  b.components["kl_center"] = 0.5 * mu * mu;
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / (delta / 3.0));
  if (!logdet) {
    b.vacuous = true;
    b.numerator = std::numeric_limits<double>::infinity();
    return b;
  }
  b.components["logdet"] = *logdet;
  for (const auto& [k, v] : b.components) b.numerator += v;
  return b;
}

/// Dimension-independent variant through the expected log-determinant inequality.
inline KlBudget bound_mvpb2(const EmpiricalAggregates& a, double mu, double sigma, double delta) {
  const auto m = a.m;
  const double width = detail::mcdiarmid_width(2.0 / delta, m);
  const double r2s2 = a.R * a.R / (sigma * sigma);
  KlBudget b;
  b.denominator = static_cast<double>(m);
  b.components["f_tilde"] = 0.5 * a.f_tilde;
  b.components["deviation"] = 0.5 * ((1.0 + mu * mu) * r2s2 + std::log1p(r2s2)) * width;
  b.components["kl_center"] = 0.5 * mu * mu;
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / (delta / 2.0));
  for (const auto& [k, v] : b.components) b.numerator += v;
  return b;
}

/// Prior centered at eta * E[y x], dimension-dependent log-determinant control.
inline KlBudget bound_mvpb3(const EmpiricalAggregates& a, const Vector& w, double mu,
                            double sigma, double eta, double delta) {
  const auto m = a.m;
  const double ln4 = std::log(4.0 / delta);
  const double width = detail::mcdiarmid_width(4.0 / delta, m);
  const double s2 = sigma * sigma;
  KlBudget b;
  b.denominator = static_cast<double>(m);
  const auto logdet = detail::logdet_bracket(a, sigma, width);
  b.components["center_mismatch"] = detail::center_mismatch(a, w, mu, eta, ln4);
  b.components["agreement"] = a.H_hat_m / (2.0 * s2);
  b.components["deviation"] =
      (a.R * a.R + mu * mu * a.R * a.R + 4.0 * eta * mu * s2 * a.R) / (2.0 * s2) * width;
  b.components["kl_center"] = 0.5 * mu * mu;
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / (delta / 4.0));
  if (!logdet) {
    b.vacuous = true;
    b.numerator = std::numeric_limits<double>::infinity();
    return b;
  }
  b.components["logdet"] = *logdet;
  for (const auto& [k, v] : b.components) b.numerator += v;
  return b;
}

/// Prior centered at eta * E[y x], expected log-determinant control.
inline KlBudget bound_mvpb4(const EmpiricalAggregates& a, const Vector& w, double mu,
                            double sigma, double eta, double delta) {
  const auto m = a.m;
  const double ln3 = std::log(3.0 / delta);
  const double width = detail::mcdiarmid_width(3.0 / delta, m);
  const double s2 = sigma * sigma;
  const double R = a.R;
  KlBudget b;
  b.denominator = static_cast<double>(m);
  b.components["center_mismatch"] = detail::center_mismatch(a, w, mu, eta, ln3);
  b.components["agreement"] = 0.5 * a.H_tilde_m;
  b.components["deviation"] =
      (R * R + 4.0 * eta * mu * s2 * R + mu * mu * R * R + s2 * std::log1p(R * R / s2)) /
      (2.0 * s2) * width;
  b.components["kl_center"] = 0.5 * mu * mu;
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / (delta / 3.0));
  for (const auto& [k, v] : b.components) b.numerator += v;
  return b;
}

/// Spherical prior N(eta w_p, I) fitted on r held-out examples; the bound applies to the
/// remaining m - r.
inline KlBudget bound_mvpb5_6(const Vector& w_p, const Vector& w, double mu, double eta,
                              Eigen::Index m, Eigen::Index r, double delta) {
  if (!(r > 0 && r < m)) throw InputError("bound_mvpb5_6: need 0 < r < m");
  if (w_p.size() != w.size()) throw InputError("bound_mvpb5_6: prior/posterior dimension mismatch");
  const double held_in = static_cast<double>(m - r);
  KlBudget b;
  b.denominator = held_in;
  b.components["center_mismatch"] = 0.5 * (eta * w_p - mu * w).squaredNorm();
  b.components["confidence"] = std::log((held_in + 1.0) / delta);
  b.numerator = b.components["center_mismatch"] + b.components["confidence"];
  return b;
}

namespace detail {

// 1/2 ( -ln|I + E_U x~x~^T / s^2| + E_U[x~^T x~ + mu^2 (w^T x~)^2] / s^2 + mu^2 ),
// the exact KL to the prior whose agreement term uses the unlabeled pool.
inline std::map<std::string, double> unlabeled_kl(const Matrix& unlabeled_xt, const Vector& w,
                                                  double mu, double sigma) {
  const double s2 = sigma * sigma;
  const double u = static_cast<double>(unlabeled_xt.rows());
  const Vector wxt = unlabeled_xt * w;
  const double energy =
      (unlabeled_xt.rowwise().squaredNorm().sum() + mu * mu * wxt.squaredNorm()) / u;
  return {{"logdet", -0.5 * logdet_identity_plus_scatter(unlabeled_xt, sigma)},
          {"agreement", 0.5 * energy / s2},
          {"kl_center", 0.5 * mu * mu}};
}

}  // namespace detail

/// Semi-supervised bound: prior agreement term estimated on the unlabeled pool.
/// `unlabeled_xt` holds rows x~ = [x1, -x2].
inline KlBudget bound_smvpb1(const Matrix& unlabeled_xt, const Vector& w, double mu, double sigma,
                             Eigen::Index m, double delta, double R = 1.0) {
  if (unlabeled_xt.rows() == 0) throw InputError("bound_smvpb1: empty unlabeled set");
  if (m < 1) throw InputError("bound_smvpb1: m must be at least 1");
  require_scaled(unlabeled_xt, R, "bound_smvpb1");
  KlBudget b;
  b.denominator = static_cast<double>(m);
  b.components = detail::unlabeled_kl(unlabeled_xt, w, mu, sigma);
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / delta);
  for (const auto& [k, v] : b.components) b.numerator += v;
  return b;
}

/// Semi-supervised bound with the prior centered at eta * E[y x].
inline KlBudget bound_smvpb2(const Matrix& unlabeled_xt, const LabeledSet& labeled,
                             const Vector& w, double mu, double sigma, double eta, double delta,
                             double R = 1.0) {
  if (unlabeled_xt.rows() == 0) throw InputError("bound_smvpb2: empty unlabeled set");
  if (labeled.size() == 0) throw InputError("bound_smvpb2: empty labeled set");
  require_scaled(unlabeled_xt, R, "bound_smvpb2");
  const auto agg = empirical_aggregates(labeled, w, mu, sigma, eta, R);
  const auto m = labeled.size();
  const double ln3 = std::log(3.0 / delta);
  KlBudget b;
  b.denominator = static_cast<double>(m);
  b.components = detail::unlabeled_kl(unlabeled_xt, w, mu, sigma);
  b.components["center_mismatch"] = detail::center_mismatch(agg, w, mu, eta, ln3);
  b.components["alignment"] = agg.S_bar_m;
  b.components["deviation"] = eta * mu * R * std::sqrt(2.0 / static_cast<double>(m) * ln3);
  b.components["confidence"] = std::log((static_cast<double>(m) + 1.0) / (delta / 3.0));
  for (const auto& [k, v] : b.components) b.numerator += v;
  return b;
}

// ---------------------------------------------------------------------------
// Priors fitted on a held-out subset

/// ((1/r) sum x~ x~^T + ridge I)^{-1} (1/r) sum y x over the subset.
inline Vector least_squares_prior(const LabeledSet& subset, double ridge) {
  if (subset.size() == 0) throw InputError("compute_subset_prior: empty subset");
  const double r = static_cast<double>(subset.size());
  const Matrix xt = signed_concatenation(subset.x, subset.d1);
  Matrix scatter = xt.transpose() * xt / r;
  const Vector target = subset.x.transpose() * subset.y / r;
  return solve_psd(scatter, target, ridge);
}

// ---------------------------------------------------------------------------
// Catalogue and evaluation

enum class BoundKind { PB1, PB2, PB3, MvPB1, MvPB2, MvPB3, MvPB4, MvPB5, MvPB6, SMvPB1, SMvPB2 };

inline constexpr std::array<BoundKind, 11> kAllBounds = {
    BoundKind::PB1,   BoundKind::PB2,   BoundKind::PB3,   BoundKind::MvPB1,
    BoundKind::MvPB2, BoundKind::MvPB3, BoundKind::MvPB4, BoundKind::MvPB5,
    BoundKind::MvPB6, BoundKind::SMvPB1, BoundKind::SMvPB2};

inline std::string_view bound_name(BoundKind k) {
  switch (k) {
    case BoundKind::PB1: return "PB-1";
    case BoundKind::PB2: return "PB-2";
    case BoundKind::PB3: return "PB-3";
    case BoundKind::MvPB1: return "MvPB-1";
    case BoundKind::MvPB2: return "MvPB-2";
    case BoundKind::MvPB3: return "MvPB-3";
    case BoundKind::MvPB4: return "MvPB-4";
    case BoundKind::MvPB5: return "MvPB-5";
    case BoundKind::MvPB6: return "MvPB-6";
    case BoundKind::SMvPB1: return "SMvPB-1";
    case BoundKind::SMvPB2: return "SMvPB-2";
  }
  return "?";
}

inline BoundKind parse_bound(std::string_view name) {
  for (auto k : kAllBounds)
    if (bound_name(k) == name) return k;
  std::string valid;
  for (auto k : kAllBounds) valid += (valid.empty() ? "" : ", ") + std::string(bound_name(k));
  throw UsageError("unknown bound '" + std::string(name) + "' (valid: " + valid + ")");
}

/// Bounds whose prior depends on eta, a held-out subset or the unlabeled pool; their
/// statements fix mu in advance, so grid selection is flagged in the report.
inline bool uses_data_dependent_prior(BoundKind k) {
  switch (k) {
    case BoundKind::MvPB3:
    case BoundKind::MvPB4:
    case BoundKind::MvPB5:
    case BoundKind::MvPB6:
    case BoundKind::SMvPB1:
    case BoundKind::SMvPB2:
      return true;
    default:
      return false;
  }
}

inline bool is_multiview(BoundKind k) {
  return k != BoundKind::PB1 && k != BoundKind::PB2 && k != BoundKind::PB3;
}

/// Everything a bound can consume. `labeled` carries the posterior's training sample;
/// for MvPB-5/6 `held_in` is the sample left after removing the prior subset, and
/// `prior_center` the w_p fitted on that subset.
struct BoundInputs {
  LabeledSet labeled;
  Vector w;  // posterior direction, normalized internally
  std::optional<Matrix> unlabeled_xt;
  std::optional<LabeledSet> held_in;
  std::optional<Vector> prior_center;
  Eigen::Index prior_subset_size = 0;
};

inline KlBudget kl_budget(BoundKind kind, const BoundInputs& in, const Vector& w, double mu,
                          const BoundConfig& cfg) {
  const auto m = in.labeled.size();
  switch (kind) {
    case BoundKind::PB1:
    case BoundKind::PB2:
    case BoundKind::PB3:
      return bound_pb(m, mu, cfg.delta);
    case BoundKind::MvPB1:
      return bound_mvpb1(empirical_aggregates(in.labeled, w, mu, cfg.sigma, cfg.eta, cfg.R), mu,
                         cfg.sigma, cfg.delta);
    case BoundKind::MvPB2:
      return bound_mvpb2(empirical_aggregates(in.labeled, w, mu, cfg.sigma, cfg.eta, cfg.R), mu,
                         cfg.sigma, cfg.delta);
    case BoundKind::MvPB3:
      return bound_mvpb3(empirical_aggregates(in.labeled, w, mu, cfg.sigma, cfg.eta, cfg.R), w,
                         mu, cfg.sigma, cfg.eta, cfg.delta);
    case BoundKind::MvPB4:
      return bound_mvpb4(empirical_aggregates(in.labeled, w, mu, cfg.sigma, cfg.eta, cfg.R), w,
                         mu, cfg.sigma, cfg.eta, cfg.delta);
    case BoundKind::MvPB5:
    case BoundKind::MvPB6: {
      if (!in.held_in || !in.prior_center)
        throw UsageError(std::string(bound_name(kind)) + " needs a prior subset");
      const auto r = in.prior_subset_size;
      return bound_mvpb5_6(*in.prior_center, w, mu, cfg.eta, in.held_in->size() + r, r,
                           cfg.delta);
    }
    case BoundKind::SMvPB1:
      if (!in.unlabeled_xt) throw UsageError("SMvPB-1 needs an unlabeled set");
      return bound_smvpb1(*in.unlabeled_xt, w, mu, cfg.sigma, m, cfg.delta, cfg.R);
    case BoundKind::SMvPB2:
      if (!in.unlabeled_xt) throw UsageError("SMvPB-2 needs an unlabeled set");
      return bound_smvpb2(*in.unlabeled_xt, in.labeled, w, mu, cfg.sigma, cfg.eta, cfg.delta,
                          cfg.R);
  }
  throw UsageError("kl_budget: unknown bound");
}

/// Evaluates one bound over cfg.mu_grid and reports the mu with the smallest certified risk.
inline BoundReport evaluate_bound(BoundKind kind, const BoundInputs& in, const BoundConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw InputError("evaluate_bound: delta must lie in (0, 1]");
  if (cfg.mu_grid.empty()) throw InputError("evaluate_bound: empty mu grid");
  const double norm = in.w.norm();
  if (!(norm > 0.0)) throw InputError("evaluate_bound: zero posterior direction");
  const Vector w = in.w / norm;
  if (is_multiview(kind)) require_scaled(in.labeled.x, cfg.R, "evaluate_bound");

  const bool held_out = kind == BoundKind::MvPB5 || kind == BoundKind::MvPB6;
  if (held_out && (!in.held_in || !in.prior_center))
    throw UsageError(std::string(bound_name(kind)) + " needs a prior subset");
  const LabeledSet& error_sample = held_out ? in.held_in.value() : in.labeled;

  BoundReport best;
  best.bound_name = std::string(bound_name(kind));
  bool have = false;
  for (const double mu : cfg.mu_grid) {
    if (!(mu > 0.0)) throw InputError("evaluate_bound: mu values must be positive");
    const double e_hat = stochastic_error(error_sample, {w, mu});
    const KlBudget budget = kl_budget(kind, in, w, mu, cfg);
    const double risk = budget.vacuous ? 1.0 : invert_kl(e_hat, budget.value());
    if (!have || risk < best.risk_bound) {
      have = true;
      best.kl_numerator = budget.numerator;
      best.stochastic_error = e_hat;
      best.risk_bound = risk;
      best.deterministic_risk_bound = 2.0 * risk;
      best.mu_used = mu;
      best.vacuous = budget.vacuous;
      best.components = budget.components;
    }
  }
  best.grid_selected_mu = uses_data_dependent_prior(kind) && cfg.mu_grid.size() > 1;
  return best;
}

}  // namespace mvpac
