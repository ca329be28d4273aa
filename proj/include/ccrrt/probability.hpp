#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ccrrt {

// ---------------------------------------------------------------------------
// Regularized lower incomplete gamma P(a, x)
// ---------------------------------------------------------------------------

namespace detail {

// Power-series expansion of P(a, x), effective for x < a + 1.
template <typename Scalar>
Scalar gamma_p_series(Scalar a, Scalar x) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar ap = a;
  Scalar del = Scalar(1) / a;
  Scalar sum = del;
  for (int i = 0; i < 500; ++i) {
    ap += Scalar(1);
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * eps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x) = 1 - P(a, x), x >= a + 1.
template <typename Scalar>
Scalar gamma_q_contfrac(Scalar a, Scalar x) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar fpmin = std::numeric_limits<Scalar>::min() / eps;
  Scalar b = x + Scalar(1) - a;
  Scalar c = Scalar(1) / fpmin;
  Scalar d = Scalar(1) / b;
  Scalar h = d;
  for (int i = 1; i < 500; ++i) {
    const Scalar an = -Scalar(i) * (Scalar(i) - a);
    b += Scalar(2);
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = Scalar(1) / d;
    const Scalar del = d * c;
    h *= del;
    if (std::abs(del - Scalar(1)) <= eps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma function P(a, x), a > 0, x >= 0.
/// Series expansion below a+1, continued fraction above.
template <typename Scalar>
Scalar regularized_gamma_p(Scalar a, Scalar x) {
  if (!(a > Scalar(0))) throw std::domain_error("regularized_gamma_p: a must be positive");
  if (x < Scalar(0)) throw std::domain_error("regularized_gamma_p: x must be nonnegative");
  if (x == Scalar(0)) return Scalar(0);
  if (x < a + Scalar(1)) return detail::gamma_p_series(a, x);
  return Scalar(1) - detail::gamma_q_contfrac(a, x);
}

// ---------------------------------------------------------------------------
// Chi-square distribution
// ---------------------------------------------------------------------------

/// Chi-square distribution with `dof` degrees of freedom.
struct ChiSquareDist {
  int dof = 2;
};

/// CDF F(x, d). Closed form 1 - exp(-x/2) at d = 2, P(d/2, x/2) otherwise.
inline double chi2_cdf(ChiSquareDist d, double x) {
  if (d.dof < 1) throw std::domain_error("chi2_cdf: dof must be >= 1");
  if (x < 0.0) throw std::domain_error("chi2_cdf: x must be nonnegative");
  if (d.dof == 2) return -std::expm1(-0.5 * x);
  return regularized_gamma_p(0.5 * d.dof, 0.5 * x);
}

/// Inverse CDF. Closed form -2 ln(1-p) at d = 2; bisection on chi2_cdf
/// otherwise: the bracket upper bound doubles until the CDF exceeds p,
/// then the interval is narrowed to 1e-12.
inline double chi2_inv(ChiSquareDist d, double p) {
  if (d.dof < 1) throw std::domain_error("chi2_inv: dof must be >= 1");
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("chi2_inv: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  if (d.dof == 2) return -2.0 * std::log1p(-p);

  double hi = 1.0;
  while (chi2_cdf(d, hi) <= p) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(d, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// 2x2 symmetric linear algebra, closed form
// ---------------------------------------------------------------------------

/// Eigen-decomposition of a symmetric 2x2 matrix via trace/determinant
/// formulas. `major_axis` is the unit eigenvector of the larger eigenvalue;
/// equal eigenvalues resolve to (1, 0).
template <typename Scalar>
struct SymEigen2 {
  Scalar lambda_max;
  Scalar lambda_min;
  Eigen::Matrix<Scalar, 2, 1> major_axis;
};

template <typename Scalar>
SymEigen2<Scalar> sym_eigen2(const Eigen::Matrix<Scalar, 2, 2>& m) {
  const Scalar a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const Scalar half_tr = (a + c) / Scalar(2);
  const Scalar disc = std::sqrt(((a - c) / Scalar(2)) * ((a - c) / Scalar(2)) + b * b);
  SymEigen2<Scalar> e;
  e.lambda_max = half_tr + disc;
  e.lambda_min = half_tr - disc;
  if (b != Scalar(0)) {
    e.major_axis = Eigen::Matrix<Scalar, 2, 1>(e.lambda_max - c, b).normalized();
  } else {
    e.major_axis = (a >= c) ? Eigen::Matrix<Scalar, 2, 1>(1, 0)
                            : Eigen::Matrix<Scalar, 2, 1>(0, 1);
  }
  return e;
}

/// Symmetric square root of an SPD 2x2 matrix:
/// sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> sqrt_spd(const Eigen::Matrix<Scalar, 2, 2>& m) {
  const Scalar s = std::sqrt(m.determinant());
  const Scalar t = std::sqrt(m.trace() + Scalar(2) * s);
  return (m + s * Eigen::Matrix<Scalar, 2, 2>::Identity()) / t;
}

// ---------------------------------------------------------------------------
// Planar Gaussian
// ---------------------------------------------------------------------------

/// Planar Gaussian with symmetric positive definite covariance.
///
/// The covariance is symmetrized on input; matrices whose smallest
/// eigenvalue falls below 1e-12 of the largest are rejected, since the
/// inverse (cached here together with the determinant) would be
/// meaningless.
template <typename Scalar>
class Gaussian2 {
 public:
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

  Gaussian2(const Vec2& mu, const Mat2& sigma) : mu_(mu) {
    sigma_ = (sigma + sigma.transpose()) / Scalar(2);
    const auto e = sym_eigen2(sigma_);
    if (!(e.lambda_min > Scalar(1e-12) * e.lambda_max) || !(e.lambda_max > Scalar(0))) {
      throw std::invalid_argument("Gaussian2: covariance must be positive definite");
    }
    det_ = sigma_.determinant();
    sigma_inv_ = sigma_.inverse();
  }

  const Vec2& mean() const { return mu_; }
  const Mat2& covariance() const { return sigma_; }
  const Mat2& covariance_inverse() const { return sigma_inv_; }
  Scalar covariance_det() const { return det_; }

 private:
  Vec2 mu_;
  Mat2 sigma_;
  Mat2 sigma_inv_;
  Scalar det_;
};

using Gaussian2d = Gaussian2<double>;

/// Squared Mahalanobis distance (x - mu)^T Sigma^{-1} (x - mu).
template <typename Scalar, typename Derived>
Scalar mahalanobis_sq(const Gaussian2<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Matrix<Scalar, 2, 1> d = x - g.mean();
  return d.dot(g.covariance_inverse() * d);
}

/// Gaussian density at x (d = 2).
template <typename Scalar, typename Derived>
Scalar pdf(const Gaussian2<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
  const Scalar norm =
      Scalar(1) / (Scalar(2) * std::numbers::pi_v<Scalar> * std::sqrt(g.covariance_det()));
  return norm * std::exp(Scalar(-0.5) * mahalanobis_sq(g, x));
}

// ---------------------------------------------------------------------------
// Risk-domain ellipse
// ---------------------------------------------------------------------------

/// Boundary of the risk domain { x : mahalanobis_sq(x) <= threshold }.
/// semi_axes = (major, minor); rotation is the major-axis angle in
/// [-pi/2, pi/2).
template <typename Scalar>
struct RiskEllipse {
  Eigen::Matrix<Scalar, 2, 1> center;
  Eigen::Matrix<Scalar, 2, 1> semi_axes;
  Scalar rotation;
  Scalar threshold;
};

using RiskEllipse2d = RiskEllipse<double>;

/// Risk-domain ellipse of `g` at risk level alpha in (0, 1]: the level set
/// mahalanobis_sq = F^{-1}(1 - alpha, dof). Axis k has half-length
/// sqrt(lambda_k * threshold); alpha = 1 degenerates to the mean point.
template <typename Scalar>
RiskEllipse<Scalar> risk_ellipse(const Gaussian2<Scalar>& g, Scalar alpha, int dof = 2) {
  if (!(alpha > Scalar(0) && alpha <= Scalar(1))) {
    throw std::domain_error("risk_ellipse: alpha must lie in (0, 1]");
  }
  const double threshold =
      chi2_inv(ChiSquareDist{dof}, static_cast<double>(Scalar(1) - alpha));
  const auto e = sym_eigen2(g.covariance());

  Scalar rot = std::atan2(e.major_axis.y(), e.major_axis.x());
  const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
  while (rot >= half_pi) rot -= Scalar(2) * half_pi;
  while (rot < -half_pi) rot += Scalar(2) * half_pi;

  RiskEllipse<Scalar> out;
  out.center = g.mean();
  out.semi_axes = {std::sqrt(e.lambda_max * Scalar(threshold)),
                   std::sqrt(e.lambda_min * Scalar(threshold))};
  out.rotation = rot;
  out.threshold = Scalar(threshold);
  return out;
}

/// Boundary point at parameter angle theta.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> ellipse_point(const RiskEllipse<Scalar>& e, Scalar theta) {
  const Scalar c = std::cos(e.rotation), s = std::sin(e.rotation);
  const Scalar px = e.semi_axes.x() * std::cos(theta);
  const Scalar py = e.semi_axes.y() * std::sin(theta);
  return {e.center.x() + c * px - s * py, e.center.y() + s * px + c * py};
}

/// Containment test in the (center, axes, rotation) representation.
template <typename Scalar>
bool ellipse_contains(const RiskEllipse<Scalar>& e, const Eigen::Matrix<Scalar, 2, 1>& p) {
  if (!(e.semi_axes.minCoeff() > Scalar(0))) return p == e.center;
  const Scalar c = std::cos(e.rotation), s = std::sin(e.rotation);
  const Eigen::Matrix<Scalar, 2, 1> d = p - e.center;
  const Scalar u = (c * d.x() + s * d.y()) / e.semi_axes.x();
  const Scalar v = (-s * d.x() + c * d.y()) / e.semi_axes.y();
  return u * u + v * v <= Scalar(1);
}

}  // namespace ccrrt
