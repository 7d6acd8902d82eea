#pragma once

#include "schatten/prox.hpp"

#include <cstdint>

namespace schatten {

// Brute-force minimizer of 0.5 (x - z)^2 + tau |x|^p: uniform grid on
// [-2|z|, 2|z|], golden-section refinement of the best cell, then candidate 0.
double prox_oracle(const ProxSpec& spec, double z, int grid = 100000);

struct ProxCheckReport {
  int samples = 0;
  double max_deviation = 0.0;
  double max_objective_gap = 0.0;  // prox objective minus oracle objective
  double worst_tau = 0.0;
  double worst_z = 0.0;
};

// Random (tau, z) pairs, log-uniform tau in [1e-2, 2], uniform z in [-5, 5].
ProxCheckReport prox_check(double p, int samples, int grid, std::uint64_t seed);

}  // namespace schatten
