#pragma once

#include "schatten/objective.hpp"

namespace schatten {

// X = U^T D(sigma_plus) V with sigma_plus nonincreasing and nonnegative.
struct CanonicalSVD {
  Vector sigma_plus;
  Matrix U;  // m x m
  Matrix V;  // n x n
  Eigen::Index r = 0;
};

CanonicalSVD canonicalize(const FactoredIterate& it);
CanonicalSVD canonical_svd(const Matrix& X);

// d(0, dF(X)) from the singular triplets of the support of X. U1 (r x m) and
// V1 (r x n) hold the support singular vectors as rows.
double dist_subdiff_support(const ProblemInstance& prob, const Matrix& G, const Vector& sigma,
                            const Matrix& U1, const Matrix& V1);

double dist_subdiff_full(const ProblemInstance& prob, const Matrix& X);
double dist_subdiff_full(const ProblemInstance& prob, const CanonicalSVD& svd);
double dist_subdiff_factored(const ProblemInstance& prob, const FactoredIterate& it);
double dist_subdiff_factored(const ProblemInstance& prob, const FactoredIterate& it,
                             const PartialGrads& grads);

double tau_sigma(const Vector& sigma_plus, Eigen::Index r);

struct HypothesisReport {
  bool distinct = false;         // nonzero singular values pairwise distinct
  bool complementarity = true;   // p = 1 only: ||U2 G V2^T||_2 <= lambda
  double off_support_norm = 0.0; // ||U2 G V2^T||_2
  double tau = 0.0;              // valid when distinct
  bool holds() const { return distinct && complementarity; }
};

HypothesisReport check_hypothesis(const ProblemInstance& prob, const CanonicalSVD& svd);

}  // namespace schatten
