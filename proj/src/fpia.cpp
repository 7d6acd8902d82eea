#include "schatten/fpia.hpp"

#include "schatten/prox.hpp"
#include "schatten/stationarity.hpp"

#include <Eigen/SVD>

#include <chrono>

namespace schatten {

namespace {

struct ThinSVD {
  Matrix U;  // m x n, columns
  Vector s;
  Matrix V;  // n x n, columns
};

ThinSVD thin_svd(const Matrix& Y, bool inject_failure) {
  if (inject_failure) throw SvdFailure("SVD did not converge (injected)");
  if (!Y.allFinite()) throw SvdFailure("SVD input has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw SvdFailure("SVD did not converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double support_dist(const ProblemInstance& prob, const Matrix& X, const ThinSVD& svd) {
  const double tol = rank_tol(svd.s);
  Eigen::Index r = 0;
  while (r < svd.s.size() && svd.s(r) > tol) ++r;
  return dist_subdiff_support(prob, grad_f(prob, X), svd.s.head(r),
                              svd.U.leftCols(r).transpose(), svd.V.leftCols(r).transpose());
}

}  // namespace

SolveResult fpia_solve(const ProblemInstance& prob, const SolverConfig& config, const Matrix& X0) {
  config.validate();
  if (!(prob.lambda() > 0.0)) throw DomainError("fpia_solve requires lambda > 0");
  if (X0.rows() != prob.m() || X0.cols() != prob.n())
    throw DimensionError("X0 shape does not match problem");
  if (!(prob.op_norm() > 0.0)) throw DomainError("fpia_solve requires a nonzero operator");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  const double t = 0.99 / prob.op_norm();
  const ProxSpec spec(prob.p(), prob.lambda() * t);
  SolveResult res;
  Matrix X = X0;

  try {
    const ThinSVD svd0 = thin_svd(X, config.inject_svd_failure_at == 0);
    TraceRecord r0;
    r0.F = f_value(prob, X) + prob.lambda() * penalty(svd0.s, prob.p());
    r0.dist = support_dist(prob, X, svd0);
    r0.ms = elapsed_ms();
    res.trace.records.push_back(r0);
    res.status = *r0.dist <= config.epsilon ? SolveStatus::Converged : SolveStatus::MaxIter;

    for (long k = 1; k <= config.max_iter && res.status != SolveStatus::Converged; ++k) {
      const Matrix Y = X - t * grad_f(prob, X);
      ThinSVD svd = thin_svd(Y, config.inject_svd_failure_at == k);
      svd.s = prox_vector(spec, svd.s);
      Matrix Xn = svd.U * svd.s.asDiagonal() * svd.V.transpose();

      TraceRecord rec;
      rec.k = k;
      rec.F = f_value(prob, Xn) + prob.lambda() * penalty(svd.s, prob.p());
      rec.rel = (Xn - X).norm() / std::max(X.norm(), 1.0);
      rec.t = t;
      X = std::move(Xn);
      if (k % config.check_every == 0 || k == config.max_iter) {
        rec.dist = support_dist(prob, X, svd);
        if (*rec.dist <= config.epsilon) res.status = SolveStatus::Converged;
      }
      rec.ms = elapsed_ms();
      res.trace.records.push_back(rec);
    }
  } catch (const NumericalFailure& e) {
    res.status = SolveStatus::NumericalFailure;
    res.message = e.what();
  }
  res.X_final = std::move(X);
  return res;
}

}  // namespace schatten
