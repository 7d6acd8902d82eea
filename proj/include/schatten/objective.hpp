#pragma once

#include "schatten/cayley.hpp"
#include "schatten/operators.hpp"

namespace schatten {

// F(X) = 0.5 ||A(X) - b||^2 + lambda ||X||_{S_p}^p over m x n matrices, m >= n.
class ProblemInstance {
 public:
  ProblemInstance(LinearMap map, Matrix b, double lambda, double p, const PowerOptions& power = {});

  const LinearMap& map() const { return map_; }
  const Matrix& b() const { return b_; }
  double lambda() const { return lambda_; }
  double p() const { return p_; }
  Eigen::Index m() const { return map_.rows(); }
  Eigen::Index n() const { return map_.cols(); }

  // ||A*A||_op from power iteration, computed once.
  double op_norm() const { return op_norm_; }
  bool op_norm_converged() const { return op_norm_converged_; }
  // ||A*(b)||_F
  double adjoint_b_norm() const { return adjoint_b_norm_; }

 private:
  LinearMap map_;
  Matrix b_;
  double lambda_;
  double p_;
  double op_norm_ = 0.0;
  bool op_norm_converged_ = false;
  double adjoint_b_norm_ = 0.0;
};

// X = U^T D(sigma) V with sigma signed and unsorted.
struct FactoredIterate {
  Vector sigma;
  Matrix U;  // m x m
  Matrix V;  // n x n

  Matrix assemble() const;
};

struct PartialGrads {
  Vector sigma;   // diag(U G V^T)
  SkewMatrix E;   // 0.5 (X G^T - G X^T)
  SkewMatrix F;   // 0.5 (X^T G - G^T X)
};

struct StepConstants {
  double l_sigma = 0.0;
  double l_omega = 0.0;
  double c = 0.0;
  double s_bar = 0.0;  // +inf when l_omega = c = 0
  double grad_E_norm = 0.0;
  double grad_F_norm = 0.0;
};

// |sigma_i| counts as nonzero above 1e-8 max(1, max_j |sigma_j|).
double rank_tol(const Vector& sigma);

// sum_i |sigma_i|^p with |0|^0 = 0.
double penalty(const Vector& sigma, double p);

double f_value(const ProblemInstance& prob, const Matrix& X);
double F_value(const ProblemInstance& prob, const Matrix& X);
double F_factored(const ProblemInstance& prob, const FactoredIterate& it);
Matrix grad_f(const ProblemInstance& prob, const Matrix& X);

PartialGrads partial_grads(const ProblemInstance& prob, const FactoredIterate& it);
// Same, given X = it.assemble() and G = grad_f(X).
PartialGrads partial_grads(const FactoredIterate& it, const Matrix& X, const Matrix& G);

StepConstants step_constants(const ProblemInstance& prob, const FactoredIterate& it,
                             const Vector& sigma_next, const PartialGrads& grads, double op_norm);

// Eqs. for the constants in terms of the norms they depend on.
StepConstants step_constants_from_norms(double op_norm, double adjoint_b_norm, double grad_f_norm,
                                        double sigma_norm, double sigma_next_norm,
                                        double grad_E_norm, double grad_F_norm);

}  // namespace schatten
