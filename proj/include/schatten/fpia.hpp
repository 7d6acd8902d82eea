#pragma once

#include "schatten/dpga.hpp"

namespace schatten {

// Proximal gradient on X with one SVD per iteration and step 0.99 / ||A*A||_op.
// Uses epsilon, max_iter, check_every and inject_svd_failure_at from the config.
SolveResult fpia_solve(const ProblemInstance& prob, const SolverConfig& config, const Matrix& X0);

}  // namespace schatten
