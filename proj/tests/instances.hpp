#pragma once

#include "oracles.hpp"
#include "schatten/objective.hpp"

#include <random>

namespace inst {

using schatten::Matrix;

struct Instance {
  schatten::ProblemInstance prob;
  Matrix X0;
};

// Well-conditioned dense A = I + 0.2 G / sqrt(m), b = A X_true (+ noise) with X_true of
// the given rank, and a small dense starting point.
inline Instance low_rank(Eigen::Index m, Eigen::Index n, Eigen::Index rank, double lambda,
                         double p, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix A = Matrix::Identity(m, m) +
                   0.2 * oracle::random_matrix(m, m, rng) / std::sqrt(static_cast<double>(m));
  const Matrix X_true =
      oracle::random_matrix(m, rank, rng) * oracle::random_matrix(rank, n, rng) / 3.0;
  Matrix b = A * X_true;
  if (noise > 0.0) b += noise * oracle::random_matrix(m, n, rng);
  Matrix X0 = 0.1 * oracle::random_matrix(m, n, rng);
  return {schatten::ProblemInstance(schatten::LinearMap(m, n, schatten::LeftMultiply{A}), b,
                                    lambda, p),
          std::move(X0)};
}

}  // namespace inst
