#pragma once

#include "schatten/objective.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace schatten {

enum class StepStrategy { Backtracking, Explicit };
enum class StationarityMode { FullSubdifferential, FactoredSubdifferential };

struct SolverConfig {
  StepStrategy strategy = StepStrategy::Backtracking;
  double alpha = 1e-4;
  double rho_t = 0.5;
  double rho_s_base = 0.5;
  double mu = 0.4;
  double epsilon = 1e-6;
  long max_iter = 50000;
  long check_every = 10;
  std::uint64_t seed = 0;
  StationarityMode stationarity_mode = StationarityMode::FullSubdifferential;
  CayleySolve cayley_solve = CayleySolve::DirectLU;
  // Test hook for FPIA: the SVD at this iteration reports failure. Negative disables.
  long inject_svd_failure_at = -1;

  void validate() const;
};

struct TraceRecord {
  long k = 0;
  double F = 0.0;
  std::optional<double> dist;
  double rel = 0.0;
  double t = 0.0;
  double s = 0.0;
  double E_norm = 0.0;
  double F_norm = 0.0;
  double ms = 0.0;
};

struct IterationTrace {
  std::vector<TraceRecord> records;
};

void write_trace_csv(std::ostream& os, const IterationTrace& trace);

enum class SolveStatus { Converged, MaxIter, NumericalFailure };
const char* to_string(SolveStatus s);

struct SolveResult {
  FactoredIterate final;  // empty factors for FPIA
  Matrix X_final;
  SolveStatus status = SolveStatus::MaxIter;
  IterationTrace trace;
  std::string message;
  std::vector<std::string> events;  // re-orthonormalizations, step-interval warnings

  std::optional<double> last_dist() const;
  double seconds() const;
};

struct StepResult {
  FactoredIterate next;
  Matrix X_next;
  double F_next = 0.0;
  double t = 0.0;
  double s = 0.0;
  double E_norm = 0.0;
  double F_norm = 0.0;
  double sigma_step_sq = 0.0;  // ||sigma_next - sigma||^2
  StepConstants consts;
  int candidates = 1;
  bool interval_empty = false;
};

FactoredIterate init_iterate(const ProblemInstance& prob, const Matrix& X0);

// Guaranteed lower bound on the descent constant of the explicit strategy.
double explicit_descent_constant(double op_norm, double mu);

StepResult dpga_step_explicit(const ProblemInstance& prob, const FactoredIterate& it, double mu,
                              CayleySolve mode = CayleySolve::DirectLU);
StepResult dpga_step_backtracking(const ProblemInstance& prob, const FactoredIterate& it,
                                  double alpha, double rho_t, double rho_s_base,
                                  CayleySolve mode = CayleySolve::DirectLU);

SolveResult solve(const ProblemInstance& prob, const SolverConfig& config, const Matrix& X0);

}  // namespace schatten
