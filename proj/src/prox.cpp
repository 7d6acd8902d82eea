#include "schatten/prox.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <string>

namespace schatten {

namespace {

constexpr double kHalf = 0.5;
constexpr double kTwoThirds = 2.0 / 3.0;

bool is_p(double p, double target) { return std::abs(p - target) < 1e-15; }

double soft(double z, double tau) {
  const double a = std::abs(z) - tau;
  return a > 0.0 ? std::copysign(a, z) : 0.0;
}

double hard(double z, double tau) {
  return std::abs(z) > std::sqrt(2.0 * tau) ? z : 0.0;
}

double half_threshold(double z, double tau) {
  const double az = std::abs(z);
  if (az <= 1.5 * std::cbrt(tau * tau)) return 0.0;
  const double phi = std::acos(std::min(1.0, (tau / 4.0) * std::pow(az / 3.0, -1.5)));
  const double x =
      (2.0 / 3.0) * az * (1.0 + std::cos(2.0 * std::numbers::pi / 3.0 - 2.0 * phi / 3.0));
  return std::copysign(x, z);
}

double two_thirds_threshold(double z, double tau) {
  const double lam = 2.0 * tau;
  const double az = std::abs(z);
  if (az <= (2.0 / 3.0) * std::pow(3.0 * lam * lam * lam, 0.25)) return 0.0;
  const double phi = std::acosh(std::max(1.0, (27.0 * z * z / 16.0) * std::pow(lam, -1.5)));
  const double a = (2.0 / std::sqrt(3.0)) * std::pow(lam, 0.25) * std::sqrt(std::cosh(phi / 3.0));
  const double r = (a + std::sqrt(std::max(0.0, 2.0 * az / a - a * a))) / 2.0;
  return std::copysign(r * r * r, z);
}

// Nonzero stationary points satisfy h(x) = x + tau p x^(p-1) = |z| on x > 0.
// h is convex with minimum at x_min; the local minimizer is the larger root.
double generic(const ProxSpec& s, double z) {
  const double az = std::abs(z);
  if (az == 0.0) return 0.0;
  const double p = s.p;
  const double x_min = std::pow(s.tau * p * (1.0 - p), 1.0 / (2.0 - p));
  auto h = [&](double x) { return x + s.tau * p * std::pow(x, p - 1.0); };
  if (h(x_min) >= az) return 0.0;
  double lo = x_min, hi = az;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < az ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  const double fx = 0.5 * (x - az) * (x - az) + s.tau * std::pow(x, p);
  return fx < 0.5 * az * az ? std::copysign(x, z) : 0.0;
}

}  // namespace

ProxSpec::ProxSpec(double p_, double tau_) : p(p_), tau(tau_) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1], got " + std::to_string(p));
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw DomainError("tau must be positive, got " + std::to_string(tau));
}

double prox_objective(const ProxSpec& spec, double z, double x) {
  return 0.5 * (x - z) * (x - z) + spec.tau * abs_pow(x, spec.p);
}

double prox_scalar(const ProxSpec& spec, double z) {
  if (!std::isfinite(z)) throw DomainError("prox input is not finite");
  if (spec.p == 1.0) return soft(z, spec.tau);
  if (spec.p == 0.0) return hard(z, spec.tau);
  if (is_p(spec.p, kHalf)) return half_threshold(z, spec.tau);
  if (is_p(spec.p, kTwoThirds)) return two_thirds_threshold(z, spec.tau);
  return generic(spec, z);
}

Vector prox_vector(const ProxSpec& spec, const Vector& z) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = prox_scalar(spec, z(i));
  return out;
}

double prox_threshold(const ProxSpec& spec) {
  const double tau = spec.tau;
  const double p = spec.p;
  if (p == 1.0) return tau;
  if (p == 0.0) return std::sqrt(2.0 * tau);
  // Nonzero minimizer x* ties with 0 where x* = (2 (1 - p) tau)^(1/(2-p)).
  const double x = std::pow(2.0 * (1.0 - p) * tau, 1.0 / (2.0 - p));
  return x + tau * p * std::pow(x, p - 1.0);
}

Matrix svt_prox(const ProxSpec& spec, const Matrix& X) {
  if (!X.allFinite()) throw SvdFailure("svt_prox: input has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw SvdFailure("svt_prox: SVD did not converge");
  const Vector s = prox_vector(spec, svd.singularValues());
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace schatten
