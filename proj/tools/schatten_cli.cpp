#include "schatten/bench.hpp"
#include "schatten/fpia.hpp"
#include "schatten/io.hpp"
#include "schatten/prox_oracle.hpp"
#include "schatten/stationarity.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace schatten;

namespace {

// Machine-readable failure line: "error: code=<code> message=<text>".
int fail(const char* code, const std::string& msg, int exit_code) {
  std::cerr << "error: code=" << code << " message=\"" << msg << "\"\n";
  return exit_code;
}

struct ProblemSource {
  std::string A_path, b_path, X0_path;
  long m = 30, n = 15;
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  double p = 1.0;

  void add(CLI::App* app) {
    app->add_option("--A", A_path, "left factor (MatrixMarket .mtx or CSV)");
    app->add_option("--b", b_path, "right-hand side (CSV or .mtx)");
    app->add_option("--X0", X0_path, "initial point (CSV or .mtx); generated when omitted");
    app->add_option("--m", m, "rows when generating")->check(CLI::PositiveNumber);
    app->add_option("--n", n, "columns when generating")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "generator seed");
    app->add_option("--lambda", lambda, "regularization weight (default 0.01 (m + n))");
    app->add_option("--p", p, "Schatten exponent in [0, 1]")->check(CLI::Range(0.0, 1.0));
  }

  Instance build() const {
    ExperimentPlan plan;
    plan.m = m;
    plan.n = n;
    plan.seed_base = seed;
    if (A_path.empty() != b_path.empty())
      throw CLI::ValidationError("--A and --b must be given together");
    if (A_path.empty()) {
      if (m < n) throw CLI::ValidationError("--m must be at least --n");
      Instance inst = gen_instance(plan, 0, p);
      const double lam = lambda.value_or(plan.lambda());
      ProblemInstance prob(inst.problem.map(), inst.b, lam, p);
      Matrix X0 = X0_path.empty() ? inst.X0 : read_dense(X0_path);
      return Instance{inst.A, inst.b, std::move(X0), std::move(prob)};
    }
    SparseMatrix A = read_sparse(A_path);
    Matrix b = read_dense(b_path);
    const Eigen::Index rows = A.cols(), cols = b.cols();
    const double lam = lambda.value_or(0.01 * static_cast<double>(rows + cols));
    ProblemInstance prob(LinearMap(rows, cols, LeftMultiply{A}), b, lam, p);
    Matrix X0 = X0_path.empty() ? Matrix(Matrix::Zero(rows, cols)) : read_dense(X0_path);
    return Instance{std::move(A), std::move(b), std::move(X0), std::move(prob)};
  }
};

struct SolverFlags {
  std::string strategy;
  void add(CLI::App* app, SolverConfig& cfg) {
    app->add_option("--eps", cfg.epsilon, "stationarity tolerance")->check(CLI::NonNegativeNumber);
    app->add_option("--max-iter", cfg.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--check-every", cfg.check_every, "stationarity check cadence")
        ->check(CLI::PositiveNumber);
    app->add_option("--strategy", strategy, "backtracking|explicit (overrides --solver)")
        ->check(CLI::IsMember({"backtracking", "explicit"}));
    app->add_option("--mu", cfg.mu, "explicit strategy parameter in (0, 1/2]");
    app->add_option("--alpha", cfg.alpha, "sufficient-descent constant");
    app->add_option("--rho-t", cfg.rho_t, "backtracking factor for t");
    app->add_option("--rho-s", cfg.rho_s_base, "backtracking base for s");
  }
};

int run_solve(const ProblemSource& src, SolverConfig cfg, const SolverFlags& flags,
              const std::string& solver, const std::string& trace_path, const std::string& out_path) {
  const Instance inst = src.build();
  SolverKind kind = parse_solver(solver);
  if (kind != SolverKind::Fpia && !flags.strategy.empty())
    kind = flags.strategy == "explicit" ? SolverKind::DpgaII : SolverKind::DpgaI;
  cfg.seed = src.seed;
  const SolveResult res = run_solver(kind, inst.problem, cfg, inst.X0);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) return fail("io", "cannot write " + trace_path, 1);
    write_trace_csv(out, res.trace);
  }
  if (!out_path.empty()) write_csv(out_path, res.X_final);
  for (const auto& e : res.events) std::cerr << "event: " << e << '\n';
  const TraceRecord& last = res.trace.records.empty() ? TraceRecord{} : res.trace.records.back();
  std::printf("solver=%s status=%s iterations=%ld F=%.10e dist=%.3e rel=%.3e time_s=%.4f\n",
              solver_name(kind), to_string(res.status), last.k, last.F,
              res.last_dist().value_or(std::nan("")), last.rel, res.seconds());
  if (res.status == SolveStatus::NumericalFailure) return fail("numerical", res.message, 1);
  return 0;
}

int run_bench(ExperimentPlan plan, const std::string& out_dir) {
  const ExperimentResult result = run_experiment(plan, [](const RunRecord& r) {
    std::fprintf(stderr, "%s p=%g run=%d status=%s iter=%ld F=%.6e dist=%.2e time=%.3fs\n",
                 solver_name(r.solver), r.p, r.run, to_string(r.status), r.iterations, r.fva, r.dis,
                 r.tim);
  });
  write_experiment(out_dir, plan, result);
  write_summary_markdown(std::cout, plan, result.rows);
  return 0;
}

int run_diag(const ProblemSource& src, const std::string& X_path) {
  const Instance inst = src.build();
  const Matrix X = read_dense(X_path);
  const CanonicalSVD svd = canonical_svd(X);
  const HypothesisReport h = check_hypothesis(inst.problem, svd);
  std::printf("F=%.10e\n", F_value(inst.problem, X));
  std::printf("dist_full=%.6e\n", dist_subdiff_full(inst.problem, svd));
  std::printf("rank=%ld\n", static_cast<long>(svd.r));
  std::printf("distinct=%s\n", h.distinct ? "yes" : "no");
  if (inst.problem.p() == 1.0)
    std::printf("off_support_norm=%.6e complementarity=%s\n", h.off_support_norm,
                h.complementarity ? "yes" : "no");
  if (h.distinct) std::printf("tau=%.6e\n", h.tau);
  else std::printf("tau=undefined (repeated nonzero singular values)\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schatten-p regularized least squares solvers"};
  app.require_subcommand(1);

  SolverConfig cfg;
  ProblemSource src;
  SolverFlags flags;
  std::string solver = "dpga1", trace_path, out_path;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance");
  src.add(solve_cmd);
  flags.add(solve_cmd, cfg);
  solve_cmd->add_option("--solver", solver, "dpga1|dpga2|fpia")
      ->check(CLI::IsMember({"dpga1", "dpga2", "fpia"}));
  solve_cmd->add_option("--trace", trace_path, "trace CSV output");
  solve_cmd->add_option("--out", out_path, "final iterate CSV output");

  ExperimentPlan plan;
  std::string config_path, bench_out = "bench_out", p_list, eps_list, solver_list;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a seeded experiment");
  bench_cmd->add_option("--config", config_path, "key = value plan file");
  bench_cmd->add_option("--m", plan.m)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--n", plan.n)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p", p_list, "comma-separated exponents");
  bench_cmd->add_option("--eps", eps_list, "tolerance for every p, or p:eps pairs");
  bench_cmd->add_option("--runs", plan.runs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", plan.seed_base);
  bench_cmd->add_option("--solvers", solver_list, "comma-separated dpga1,dpga2,fpia");
  bench_cmd->add_option("--max-iter", plan.solver.max_iter)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench_out, "output directory");

  double check_p = 0.5;
  int grid = 100000, samples = 1000;
  std::uint64_t check_seed = 0;
  CLI::App* prox_cmd = app.add_subcommand("prox-check", "compare closed-form prox with brute force");
  prox_cmd->add_option("--p", check_p)->check(CLI::Range(0.0, 1.0));
  prox_cmd->add_option("--grid", grid)->check(CLI::PositiveNumber);
  prox_cmd->add_option("--samples", samples)->check(CLI::PositiveNumber);
  prox_cmd->add_option("--seed", check_seed);

  ProblemSource diag_src;
  std::string X_path;
  CLI::App* diag_cmd = app.add_subcommand("diag", "stationarity and tau report for a matrix");
  diag_src.add(diag_cmd);
  diag_cmd->add_option("--X", X_path, "matrix to diagnose (CSV or .mtx)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  }

  try {
    if (*solve_cmd) {
      cfg.validate();
      return run_solve(src, cfg, flags, solver, trace_path, out_path);
    }
    if (*bench_cmd) {
      if (!config_path.empty()) {
        const ExperimentPlan base = load_plan_config(config_path);
        // Flags given on the command line override the file.
        ExperimentPlan merged = base;
        if (bench_cmd->count("--m")) merged.m = plan.m;
        if (bench_cmd->count("--n")) merged.n = plan.n;
        if (bench_cmd->count("--runs")) merged.runs = plan.runs;
        if (bench_cmd->count("--seed")) merged.seed_base = plan.seed_base;
        if (bench_cmd->count("--max-iter")) merged.solver.max_iter = plan.solver.max_iter;
        plan = merged;
      }
      std::string overrides;
      if (!p_list.empty()) {
        overrides += "p = " + p_list + "\n";
      } else {
        // A bare --eps value applies to the p values already in the plan.
        std::ostringstream ps;
        ps.precision(17);
        for (std::size_t i = 0; i < plan.p_list.size(); ++i) ps << (i ? ", " : "") << plan.p_list[i];
        overrides += "p = " + ps.str() + "\n";
      }
      if (!eps_list.empty()) overrides += "eps = " + eps_list + "\n";
      if (!solver_list.empty()) overrides += "solvers = " + solver_list + "\n";
      if (!overrides.empty()) {
        std::istringstream in(overrides);
        const ExperimentPlan o = parse_plan_config(in);
        if (!p_list.empty()) plan.p_list = o.p_list;
        if (!eps_list.empty())
          for (const auto& [p, e] : o.epsilon_by_p) plan.epsilon_by_p[p] = e;
        if (!solver_list.empty()) plan.solvers = o.solvers;
      }
      plan.validate();
      return run_bench(plan, bench_out);
    }
    if (*prox_cmd) {
      const ProxCheckReport r = prox_check(check_p, samples, grid, check_seed);
      std::printf("p=%g samples=%d grid=%d max_deviation=%.3e max_objective_gap=%.3e\n", check_p,
                  r.samples, grid, r.max_deviation, r.max_objective_gap);
      return r.max_deviation <= 1e-6 ? 0 : fail("prox_mismatch", "deviation above 1e-6", 1);
    }
    if (*diag_cmd) return run_diag(diag_src, X_path);
  } catch (const CLI::ValidationError& e) {
    return fail("usage", e.what(), 2);
  } catch (const ParseError& e) {
    return fail("usage", e.what(), 2);
  } catch (const DimensionError& e) {
    return fail("usage", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("usage", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
