#include "schatten/stationarity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace schatten {

namespace {

Eigen::Index support_size(const Vector& sigma_plus) {
  const double tol = rank_tol(sigma_plus);
  Eigen::Index r = 0;
  while (r < sigma_plus.size() && sigma_plus(r) > tol) ++r;
  return r;
}

// Component of G orthogonal to the support on both sides.
Matrix off_support_block(const Matrix& G, const Matrix& U1, const Matrix& V1) {
  const Matrix GV = G * V1.transpose();
  Matrix R = G - U1.transpose() * (U1 * G) - GV * V1;
  R += U1.transpose() * (U1 * GV) * V1;
  return R;
}

Vector singular_values(const Matrix& R) {
  const Matrix gram = R.cols() <= R.rows() ? Matrix(R.transpose() * R) : Matrix(R * R.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

CanonicalSVD canonicalize(const FactoredIterate& it) {
  const Eigen::Index n = it.sigma.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(it.sigma(a)) > std::abs(it.sigma(b));
  });
  CanonicalSVD out;
  out.sigma_plus.resize(n);
  out.U = it.U;
  out.V.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[static_cast<std::size_t>(k)];
    out.sigma_plus(k) = std::abs(it.sigma(i));
    out.U.row(k) = it.sigma(i) < 0.0 ? Eigen::RowVectorXd(-it.U.row(i)) : Eigen::RowVectorXd(it.U.row(i));
    out.V.row(k) = it.V.row(i);
  }
  out.r = support_size(out.sigma_plus);
  return out;
}

CanonicalSVD canonical_svd(const Matrix& X) {
  if (!X.allFinite()) throw SvdFailure("canonical_svd: non-finite input");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw SvdFailure("canonical_svd: SVD did not converge");
  CanonicalSVD out;
  out.sigma_plus = svd.singularValues();
  out.U = svd.matrixU().transpose();
  out.V = svd.matrixV().transpose();
  out.r = support_size(out.sigma_plus);
  return out;
}

double dist_subdiff_support(const ProblemInstance& prob, const Matrix& G, const Vector& sigma,
                            const Matrix& U1, const Matrix& V1) {
  const double lam = prob.lambda();
  const double p = prob.p();
  const Eigen::Index r = sigma.size();

  const Matrix UG = U1 * G;          // r x n
  const Matrix GV = G * V1.transpose();  // m x r
  Matrix M11 = UG * V1.transpose();
  const double d12 = (UG - M11 * V1).squaredNorm();
  const double d21 = (GV - U1.transpose() * M11).squaredNorm();
  if (p > 0.0)
    for (Eigen::Index i = 0; i < r; ++i) M11(i, i) += lam * p * std::pow(sigma(i), p - 1.0);
  double d = M11.squaredNorm() + d12 + d21;

  if (p == 1.0) {
    const Matrix R = off_support_block(G, U1, V1);
    if (R.norm() > lam) {
      const Vector s = singular_values(R);
      for (Eigen::Index j = 0; j < s.size(); ++j) {
        const double e = std::max(s(j) - lam, 0.0);
        d += e * e;
      }
    }
  }
  return std::sqrt(d);
}

double dist_subdiff_full(const ProblemInstance& prob, const CanonicalSVD& svd) {
  const Eigen::Index n = svd.sigma_plus.size();
  const Matrix X = svd.U.topRows(n).transpose() * svd.sigma_plus.asDiagonal() * svd.V;
  const Matrix G = grad_f(prob, X);
  return dist_subdiff_support(prob, G, svd.sigma_plus.head(svd.r), svd.U.topRows(svd.r),
                              svd.V.topRows(svd.r));
}

double dist_subdiff_full(const ProblemInstance& prob, const Matrix& X) {
  if (!X.allFinite()) throw SvdFailure("dist_subdiff_full: non-finite input");
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw SvdFailure("dist_subdiff_full: SVD did not converge");
  const Vector& s = svd.singularValues();
  const Eigen::Index r = support_size(s);
  return dist_subdiff_support(prob, grad_f(prob, X), s.head(r),
                              svd.matrixU().leftCols(r).transpose(),
                              svd.matrixV().leftCols(r).transpose());
}

double dist_subdiff_factored(const ProblemInstance& prob, const FactoredIterate& it,
                             const PartialGrads& grads) {
  const double lam = prob.lambda();
  const double p = prob.p();
  const double tol = rank_tol(it.sigma);
  double d = grads.E.matrix().squaredNorm() + grads.F.matrix().squaredNorm();
  for (Eigen::Index i = 0; i < it.sigma.size(); ++i) {
    const double s = it.sigma(i);
    const double g = grads.sigma(i);
    double e = 0.0;
    if (std::abs(s) > tol)
      e = p > 0.0 ? g + lam * p * std::copysign(std::pow(std::abs(s), p - 1.0), s) : g;
    else if (p == 1.0)
      e = std::max(std::abs(g) - lam, 0.0);
    d += e * e;
  }
  return std::sqrt(d);
}

double dist_subdiff_factored(const ProblemInstance& prob, const FactoredIterate& it) {
  return dist_subdiff_factored(prob, it, partial_grads(prob, it));
}

double tau_sigma(const Vector& sigma_plus, Eigen::Index r) {
  if (r < 1 || r > sigma_plus.size()) throw DomainError("tau_sigma: support size out of range");
  const Vector s = sigma_plus.head(r);
  if (s.minCoeff() <= 0.0) throw DomainError("tau_sigma: support entries must be positive");
  std::vector<double> v(s.data(), s.data() + r);
  std::sort(v.begin(), v.end());
  double value = 1.0 / v.front();
  if (r > 1) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k] - v[k - 1] < 1e-12) throw HypothesisViolation("repeated nonzero singular value");
      min_gap = std::min(min_gap, v[k] * v[k] - v[k - 1] * v[k - 1]);
    }
    value = std::max(value, v.back() / min_gap);
  }
  return std::sqrt(2.0) * value;
}

HypothesisReport check_hypothesis(const ProblemInstance& prob, const CanonicalSVD& svd) {
  HypothesisReport rep;
  const Eigen::Index n = svd.sigma_plus.size();
  if (svd.r >= 1) {
    try {
      rep.tau = tau_sigma(svd.sigma_plus, svd.r);
      rep.distinct = true;
    } catch (const HypothesisViolation&) {
      rep.distinct = false;
    }
  }
  if (prob.p() == 1.0) {
    const Matrix X = svd.U.topRows(n).transpose() * svd.sigma_plus.asDiagonal() * svd.V;
    const Matrix G = grad_f(prob, X);
    const Matrix R = off_support_block(G, svd.U.topRows(svd.r), svd.V.topRows(svd.r));
    const Vector s = singular_values(R);
    rep.off_support_norm = s.size() ? s.maxCoeff() : 0.0;
    rep.complementarity = rep.off_support_norm <= prob.lambda();
  }
  return rep;
}

}  // namespace schatten
