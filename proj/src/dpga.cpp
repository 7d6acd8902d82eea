#include "schatten/dpga.hpp"

#include "schatten/prox.hpp"
#include "schatten/stationarity.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace schatten {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxCandidates = 200;

double inv(double x) { return x > 0.0 ? 1.0 / x : kInf; }

double penalty_change(const Vector& from, const Vector& to, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < from.size(); ++i) acc += abs_pow(to(i), p) - abs_pow(from(i), p);
  return acc;
}

// Quantities at the current iterate shared by both strategies.
struct Current {
  const FactoredIterate& it;
  Matrix X;
  double F;
};

Matrix rotate(const Matrix& Q, const SkewMatrix& grad, double s, CayleySolve mode) {
  if (s == 0.0 || grad.norm() == 0.0) return Q;
  return cayley_update(Q, SkewMatrix::skew_part(-s * grad.matrix()), mode);
}

StepResult explicit_step(const ProblemInstance& prob, const Current& cur, double mu,
                         CayleySolve mode) {
  const FactoredIterate& it = cur.it;
  const Matrix G = grad_f(prob, cur.X);
  const PartialGrads grads = partial_grads(it, cur.X, G);
  const double gE = grads.E.norm();
  const double gF = grads.F.norm();
  const double gnorm = G.norm();
  const double op = prob.op_norm();
  const double sigma_norm = it.sigma.norm();

  StepResult r;
  const double l_sigma = op + 2.0 * gnorm + 2.0 * op * sigma_norm;
  r.t = (1.0 - mu) / l_sigma;
  r.next.sigma = prox_vector(ProxSpec(prob.p(), prob.lambda() * r.t), it.sigma - r.t * grads.sigma);
  r.consts = step_constants_from_norms(op, prob.adjoint_b_norm(), gnorm, sigma_norm,
                                       r.next.sigma.norm(), gE, gF);

  const double upper = std::min({1.0 / mu, (1.0 - mu) * r.consts.s_bar, inv(gE), inv(gF)});
  const double lower = std::min({1.0, mu * r.consts.s_bar, inv(gE), inv(gF)});
  r.interval_empty = lower > upper;
  r.s = upper;
  r.next.U = rotate(it.U, grads.E, r.s, mode);
  r.next.V = rotate(it.V, grads.F, r.s, mode);
  r.E_norm = r.s * gE;
  r.F_norm = r.s * gF;
  if (r.E_norm > 1.0 + 1e-12 || r.F_norm > 1.0 + 1e-12)
    throw NumericalFailure("explicit step produced ||E|| or ||F|| above 1");
  r.sigma_step_sq = (r.next.sigma - it.sigma).squaredNorm();
  r.X_next = r.next.assemble();
  r.F_next = f_value(prob, r.X_next) + prob.lambda() * penalty(r.next.sigma, prob.p());
  return r;
}

StepResult backtracking_step(const ProblemInstance& prob, const Current& cur, double alpha,
                             double rho_t, double rho_s_base, CayleySolve mode) {
  const FactoredIterate& it = cur.it;
  const Matrix G = grad_f(prob, cur.X);
  const PartialGrads grads = partial_grads(it, cur.X, G);
  const double gE = grads.E.norm();
  const double gF = grads.F.norm();
  const double rho_s = std::min(rho_s_base, 0.99 / std::max({gE, gF, 1e-300}));

  StepResult r;
  int sigma_i = -1, rot_j = -1;
  Vector sigma_trial;
  Matrix U_trial, V_trial;
  for (int c = 0; c < kMaxCandidates; ++c) {
    const int i = c / 2;
    const int j = (c + 1) / 2;
    const double t = std::pow(rho_t, i);
    const double s = std::pow(rho_s, j);
    // E = -s grad_E must stay in the unit Frobenius ball.
    if (s * gE > 1.0 || s * gF > 1.0) continue;
    if (i != sigma_i) {
      sigma_trial =
          prox_vector(ProxSpec(prob.p(), prob.lambda() * t), it.sigma - t * grads.sigma);
      sigma_i = i;
    }
    if (j != rot_j) {
      U_trial = rotate(it.U, grads.E, s, mode);
      V_trial = rotate(it.V, grads.F, s, mode);
      rot_j = j;
    }
    FactoredIterate trial{sigma_trial, U_trial, V_trial};
    Matrix X = trial.assemble();
    // f is quadratic, so f(X) - f(X_k) = <D, G> + |A(D)|^2 / 2 exactly; comparing the
    // difference avoids the cancellation in F(X) - F(X_k) once steps drop below ulp(F).
    const Matrix D = X - cur.X;
    const double df = (D.array() * G.array()).sum() + 0.5 * prob.map().apply(D).squaredNorm();
    const double dpen = penalty_change(it.sigma, sigma_trial, prob.p());
    const double dsig = (sigma_trial - it.sigma).squaredNorm();
    const double step_sq = dsig + s * s * (gE * gE + gF * gF);
    // A trial that rounds back to the current iterate is a null step; accepting it lets
    // solve() report the floating-point fixed point instead of failing the search.
    const bool unchanged =
        sigma_trial == it.sigma && U_trial == it.U && V_trial == it.V;
    if (unchanged || df + prob.lambda() * dpen + alpha * step_sq <= 0.0) {
      const double F = f_value(prob, X) + prob.lambda() * penalty(sigma_trial, prob.p());
      r.next = std::move(trial);
      r.X_next = std::move(X);
      r.F_next = F;
      r.t = t;
      r.s = s;
      r.E_norm = s * gE;
      r.F_norm = s * gF;
      r.sigma_step_sq = dsig;
      r.candidates = c + 1;
      const double op = prob.op_norm();
      r.consts = step_constants_from_norms(op, prob.adjoint_b_norm(), G.norm(), it.sigma.norm(),
                                           sigma_trial.norm(), gE, gF);
      return r;
    }
  }
  throw NumericalFailure("backtracking found no step satisfying sufficient descent within " +
                         std::to_string(kMaxCandidates) + " candidates");
}

double stationarity(const ProblemInstance& prob, const FactoredIterate& it, StationarityMode mode) {
  if (mode == StationarityMode::FactoredSubdifferential) return dist_subdiff_factored(prob, it);
  return dist_subdiff_full(prob, canonicalize(it));
}

}  // namespace

void SolverConfig::validate() const {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (!(rho_t > 0.0 && rho_t < 1.0)) throw DomainError("rho_t must lie in (0, 1)");
  if (!(rho_s_base > 0.0)) throw DomainError("rho_s must be positive");
  if (!(mu > 0.0 && mu <= 0.5)) throw DomainError("mu must lie in (0, 1/2]");
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be nonnegative");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (check_every < 1) throw DomainError("check_every must be at least 1");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

std::optional<double> SolveResult::last_dist() const {
  for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it)
    if (it->dist) return it->dist;
  return std::nullopt;
}

double SolveResult::seconds() const {
  return trace.records.empty() ? 0.0 : trace.records.back().ms / 1000.0;
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "k,F,dist,rel,t,s,En,Fn,ms\n";
  os.precision(17);
  for (const auto& r : trace.records) {
    os << r.k << ',' << r.F << ',';
    if (r.dist) os << *r.dist;
    os << ',' << r.rel << ',' << r.t << ',' << r.s << ',' << r.E_norm << ',' << r.F_norm << ','
       << r.ms << '\n';
  }
}

FactoredIterate init_iterate(const ProblemInstance& prob, const Matrix& X0) {
  const Eigen::Index m = prob.m(), n = prob.n();
  if (X0.rows() != m || X0.cols() != n) throw DimensionError("X0 shape does not match problem");
  if (!X0.allFinite()) throw NumericalFailure("init_iterate: X0 has non-finite entries");
  FactoredIterate it;
  if (X0.isZero(0.0)) {
    it.sigma = Vector::Zero(n);
    it.U = Matrix::Identity(m, m);
    it.V = Matrix::Identity(n, n);
    return it;
  }
  Eigen::BDCSVD<Matrix> svd(X0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("init_iterate: SVD did not converge");
  it.sigma = svd.singularValues();
  it.U = svd.matrixU().transpose();
  it.V = svd.matrixV().transpose();
  return it;
}

double explicit_descent_constant(double op_norm, double mu) {
  return std::min(mu * op_norm / (2.0 * (1.0 - mu)),
                  mu * mu * mu * (2.0 - mu) / (2.0 * (1.0 - mu)));
}

StepResult dpga_step_explicit(const ProblemInstance& prob, const FactoredIterate& it, double mu,
                              CayleySolve mode) {
  Matrix X = it.assemble();
  const double F = f_value(prob, X) + prob.lambda() * penalty(it.sigma, prob.p());
  return explicit_step(prob, Current{it, std::move(X), F}, mu, mode);
}

StepResult dpga_step_backtracking(const ProblemInstance& prob, const FactoredIterate& it,
                                  double alpha, double rho_t, double rho_s_base, CayleySolve mode) {
  Matrix X = it.assemble();
  const double F = f_value(prob, X) + prob.lambda() * penalty(it.sigma, prob.p());
  return backtracking_step(prob, Current{it, std::move(X), F}, alpha, rho_t, rho_s_base, mode);
}

SolveResult solve(const ProblemInstance& prob, const SolverConfig& config, const Matrix& X0) {
  config.validate();
  if (!(prob.lambda() > 0.0)) throw DomainError("solve requires lambda > 0");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  SolveResult res;
  FactoredIterate it;
  try {
    it = init_iterate(prob, X0);
  } catch (const NumericalFailure& e) {
    res.status = SolveStatus::NumericalFailure;
    res.message = e.what();
    return res;
  }
  Matrix X = it.assemble();
  double F = f_value(prob, X) + prob.lambda() * penalty(it.sigma, prob.p());

  TraceRecord r0;
  r0.F = F;
  r0.dist = stationarity(prob, it, config.stationarity_mode);
  r0.ms = elapsed_ms();
  res.trace.records.push_back(r0);
  res.status = *r0.dist <= config.epsilon ? SolveStatus::Converged : SolveStatus::MaxIter;

  for (long k = 1; k <= config.max_iter && res.status != SolveStatus::Converged; ++k) {
    StepResult step;
    try {
      const Current cur{it, X, F};
      step = config.strategy == StepStrategy::Explicit
                 ? explicit_step(prob, cur, config.mu, config.cayley_solve)
                 : backtracking_step(prob, cur, config.alpha, config.rho_t, config.rho_s_base,
                                     config.cayley_solve);
    } catch (const NumericalFailure& e) {
      res.status = SolveStatus::NumericalFailure;
      res.message = "iteration " + std::to_string(k) + ": " + e.what();
      break;
    }
    if (step.interval_empty)
      res.events.push_back("iteration " + std::to_string(k) +
                           ": empty step interval, using the upper bound");

    // The step map is deterministic, so an unchanged iterate repeats until max_iter.
    const bool fixed = step.next.sigma == it.sigma && step.next.U == it.U && step.next.V == it.V;

    TraceRecord rec;
    rec.k = k;
    rec.F = step.F_next;
    rec.rel = (step.X_next - X).norm() / std::max(X.norm(), 1.0);
    rec.t = step.t;
    rec.s = step.s;
    rec.E_norm = step.E_norm;
    rec.F_norm = step.F_norm;
    it = std::move(step.next);
    X = std::move(step.X_next);
    F = step.F_next;

    if (fixed || k % config.check_every == 0 || k == config.max_iter) {
      const double du = orthogonality_error(it.U);
      const double dv = orthogonality_error(it.V);
      if (du > 1e-8 || dv > 1e-8) {
        it.U = reorthonormalize(it.U);
        it.V = reorthonormalize(it.V);
        X = it.assemble();
        F = f_value(prob, X) + prob.lambda() * penalty(it.sigma, prob.p());
        rec.F = F;
        res.events.push_back("iteration " + std::to_string(k) + ": re-orthonormalized (drift " +
                             std::to_string(std::max(du, dv)) + ")");
      }
      rec.dist = stationarity(prob, it, config.stationarity_mode);
      if (*rec.dist <= config.epsilon) res.status = SolveStatus::Converged;
    }
    rec.ms = elapsed_ms();
    res.trace.records.push_back(rec);
    if (fixed && res.status != SolveStatus::Converged) {
      res.events.push_back("iteration " + std::to_string(k) +
                           ": exact fixed point, stopping before max_iter");
      break;
    }
  }

  res.final = std::move(it);
  res.X_final = std::move(X);
  return res;
}

}  // namespace schatten
