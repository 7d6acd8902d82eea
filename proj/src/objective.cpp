#include "schatten/objective.hpp"

#include "schatten/prox.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace schatten {

ProblemInstance::ProblemInstance(LinearMap map, Matrix b, double lambda, double p,
                                 const PowerOptions& power)
    : map_(std::move(map)), b_(std::move(b)), lambda_(lambda), p_(p) {
  if (map_.rows() < map_.cols())
    throw DimensionError("problem requires m >= n, got " + std::to_string(map_.rows()) + "x" +
                         std::to_string(map_.cols()));
  if (b_.rows() != map_.codomain_rows() || b_.cols() != map_.codomain_cols())
    throw DimensionError("b does not match the codomain of the linear map");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw DomainError("lambda must be >= 0");
  if (!(p_ >= 0.0 && p_ <= 1.0)) throw DomainError("p must lie in [0, 1]");
  const OpNormEstimate est = op_norm_AtA(map_, power);
  op_norm_ = est.value;
  op_norm_converged_ = est.converged;
  adjoint_b_norm_ = map_.adjoint(b_).norm();
}

Matrix FactoredIterate::assemble() const {
  const Eigen::Index n = sigma.size();
  return U.topRows(n).transpose() * sigma.asDiagonal() * V;
}

double rank_tol(const Vector& sigma) {
  const double mx = sigma.size() ? sigma.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, mx);
}

double penalty(const Vector& sigma, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) s += abs_pow(sigma(i), p);
  return s;
}

double f_value(const ProblemInstance& prob, const Matrix& X) {
  return 0.5 * (prob.map().apply(X) - prob.b()).squaredNorm();
}

double F_value(const ProblemInstance& prob, const Matrix& X) {
  if (!X.allFinite()) throw SvdFailure("F_value: non-finite input");
  Eigen::BDCSVD<Matrix> svd(X);
  if (svd.info() != Eigen::Success) throw SvdFailure("F_value: SVD did not converge");
  const Vector& s = svd.singularValues();
  double reg = 0.0;
  if (prob.p() == 0.0) {
    const double tol = rank_tol(s);
    for (Eigen::Index i = 0; i < s.size(); ++i) reg += s(i) > tol ? 1.0 : 0.0;
  } else {
    reg = penalty(s, prob.p());
  }
  return f_value(prob, X) + prob.lambda() * reg;
}

double F_factored(const ProblemInstance& prob, const FactoredIterate& it) {
  return f_value(prob, it.assemble()) + prob.lambda() * penalty(it.sigma, prob.p());
}

Matrix grad_f(const ProblemInstance& prob, const Matrix& X) {
  return grad_f(prob.map(), prob.b(), X);
}

PartialGrads partial_grads(const FactoredIterate& it, const Matrix& X, const Matrix& G) {
  const Eigen::Index n = it.sigma.size();
  const Matrix W = it.U.topRows(n) * G;  // rows n..m of U drop out of the diagonal
  Vector gs(n);
  for (Eigen::Index i = 0; i < n; ++i) gs(i) = W.row(i).dot(it.V.row(i));
  return {gs, SkewMatrix::skew_part(X * G.transpose()), SkewMatrix::skew_part(X.transpose() * G)};
}

PartialGrads partial_grads(const ProblemInstance& prob, const FactoredIterate& it) {
  const Matrix X = it.assemble();
  return partial_grads(it, X, grad_f(prob, X));
}

StepConstants step_constants_from_norms(double op_norm, double adjoint_b_norm, double grad_f_norm,
                                        double sigma_norm, double sigma_next_norm,
                                        double grad_E_norm, double grad_F_norm) {
  StepConstants c;
  c.grad_E_norm = grad_E_norm;
  c.grad_F_norm = grad_F_norm;
  c.l_sigma = op_norm + 2.0 * grad_f_norm + 2.0 * op_norm * sigma_norm;
  c.l_omega =
      op_norm * sigma_norm * sigma_norm + (0.5 + sigma_norm) * grad_f_norm + 0.5 * sigma_norm;
  c.c = (op_norm * sigma_next_norm * sigma_next_norm + adjoint_b_norm * sigma_next_norm) *
        (grad_E_norm + grad_F_norm);
  const double disc = c.l_omega * c.l_omega + 2.0 * c.c;
  c.s_bar = disc > 0.0 ? 2.0 / (std::sqrt(disc) + c.l_omega)
                       : std::numeric_limits<double>::infinity();
  return c;
}

StepConstants step_constants(const ProblemInstance& prob, const FactoredIterate& it,
                             const Vector& sigma_next, const PartialGrads& grads, double op_norm) {
  const double gnorm = grad_f(prob, it.assemble()).norm();
  return step_constants_from_norms(op_norm, prob.adjoint_b_norm(), gnorm, it.sigma.norm(),
                                   sigma_next.norm(), grads.E.norm(), grads.F.norm());
}

}  // namespace schatten
