#pragma once

#include "schatten/types.hpp"

#include <cmath>

namespace schatten {

// Parameters of x -> argmin_y 0.5 (y - x)^2 + tau |y|^p.
struct ProxSpec {
  double p;
  double tau;

  ProxSpec(double p, double tau);
};

// 0.5 (x - z)^2 + tau |x|^p, with |0|^0 = 0.
double prox_objective(const ProxSpec& spec, double z, double x);

// Closed forms for p in {0, 1/2, 2/3, 1}; bracketed root search otherwise.
// Ties between 0 and a nonzero minimizer resolve to 0.
double prox_scalar(const ProxSpec& spec, double z);

Vector prox_vector(const ProxSpec& spec, const Vector& z);

// Smallest |z| for which the prox is nonzero.
double prox_threshold(const ProxSpec& spec);

// Singular value thresholding with the scalar prox applied to the singular values.
Matrix svt_prox(const ProxSpec& spec, const Matrix& X);

// Shared by the solvers: |x|^p with |0|^0 = 0.
inline double abs_pow(double x, double p) {
  if (p == 0.0) return x == 0.0 ? 0.0 : 1.0;
  if (p == 1.0) return std::abs(x);
  return x == 0.0 ? 0.0 : std::pow(std::abs(x), p);
}

}  // namespace schatten
