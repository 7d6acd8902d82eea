#include "schatten/bench.hpp"

#include "schatten/fpia.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace schatten {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ParseError("config: '" + key + "' expects an integer");
  return static_cast<long>(x);
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string cell(const std::optional<double>& v, const char* spec) {
  return v ? fmt(spec, *v) : "-";
}

std::string p_label(double p) { return fmt("%g", p); }

}  // namespace

const char* solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::DpgaI: return "DPGA-I";
    case SolverKind::DpgaII: return "DPGA-II";
    case SolverKind::Fpia: return "FPIA";
  }
  return "?";
}

const char* solver_slug(SolverKind s) {
  switch (s) {
    case SolverKind::DpgaI: return "dpga1";
    case SolverKind::DpgaII: return "dpga2";
    case SolverKind::Fpia: return "fpia";
  }
  return "?";
}

SolverKind parse_solver(const std::string& s) {
  if (s == "dpga1" || s == "DPGA-I") return SolverKind::DpgaI;
  if (s == "dpga2" || s == "DPGA-II") return SolverKind::DpgaII;
  if (s == "fpia" || s == "FPIA") return SolverKind::Fpia;
  throw ParseError("unknown solver '" + s + "'");
}

std::map<double, double> default_epsilon_by_p() {
  return {{0.0, 5e-1}, {0.5, 5e-2}, {2.0 / 3.0, 5e-3}, {1.0, 5e-6}};
}

double ExperimentPlan::epsilon_for(double p) const {
  for (const auto& [q, eps] : epsilon_by_p)
    if (std::abs(q - p) < 1e-9) return eps;
  throw DomainError("no stopping tolerance configured for p = " + p_label(p));
}

void ExperimentPlan::validate() const {
  if (m < n || n < 1) throw DomainError("plan requires m >= n >= 1");
  if (runs < 1) throw DomainError("plan requires runs >= 1");
  for (double d : {density_A, density_b, density_X0})
    if (!(d > 0.0 && d <= 1.0)) throw DomainError("densities must lie in (0, 1]");
  if (p_list.empty()) throw DomainError("plan has no p values");
  for (double p : p_list) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
    epsilon_for(p);
  }
  if (solvers.empty()) throw DomainError("plan has no solvers");
  if (!(lambda() > 0.0)) throw DomainError("lambda must be positive");
  solver.validate();
}

SparseMatrix sparse_uniform(Eigen::Index rows, Eigen::Index cols, double density,
                            std::mt19937_64& rng) {
  const long long total = static_cast<long long>(rows) * cols;
  const long long count = std::llround(density * static_cast<double>(total));
  // Floyd's sampling of `count` distinct linear indices.
  std::unordered_set<long long> chosen;
  std::vector<long long> order;
  order.reserve(static_cast<std::size_t>(count));
  for (long long j = total - count; j < total; ++j) {
    const long long r = std::uniform_int_distribution<long long>(0, j)(rng);
    const long long pick = chosen.insert(r).second ? r : j;
    if (pick == j) chosen.insert(j);
    order.push_back(pick);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(order.size());
  for (long long idx : order) {
    double v = 0.0;
    while (v == 0.0) v = unit(rng);
    trips.emplace_back(static_cast<Eigen::Index>(idx % rows), static_cast<Eigen::Index>(idx / rows), v);
  }
  SparseMatrix A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Instance gen_instance(const ExperimentPlan& plan, int run_index, double p) {
  std::seed_seq seq{static_cast<std::uint32_t>(plan.seed_base),
                    static_cast<std::uint32_t>(plan.seed_base >> 32),
                    static_cast<std::uint32_t>(run_index)};
  std::mt19937_64 rng(seq);
  SparseMatrix A = sparse_uniform(plan.m, plan.m, plan.density_A, rng);
  Matrix b = Matrix(sparse_uniform(plan.m, plan.n, plan.density_b, rng));
  Matrix X0 = Matrix(sparse_uniform(plan.m, plan.n, plan.density_X0, rng));
  PowerOptions power;
  power.seed = plan.solver.seed;
  ProblemInstance prob(LinearMap(plan.m, plan.n, LeftMultiply{A}), b, plan.lambda(), p, power);
  return Instance{std::move(A), std::move(b), std::move(X0), std::move(prob)};
}

SolveResult run_solver(SolverKind kind, const ProblemInstance& prob, const SolverConfig& base,
                       const Matrix& X0) {
  SolverConfig cfg = base;
  switch (kind) {
    case SolverKind::DpgaI:
      cfg.strategy = StepStrategy::Backtracking;
      return solve(prob, cfg, X0);
    case SolverKind::DpgaII:
      cfg.strategy = StepStrategy::Explicit;
      return solve(prob, cfg, X0);
    case SolverKind::Fpia:
      return fpia_solve(prob, cfg, X0);
  }
  throw DomainError("unknown solver");
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const ProgressFn& progress) {
  plan.validate();
  ExperimentResult result;
  for (double p : plan.p_list) {
    SolverConfig cfg = plan.solver;
    cfg.epsilon = plan.epsilon_for(p);
    for (int run = 0; run < plan.runs; ++run) {
      const Instance inst = gen_instance(plan, run, p);
      for (SolverKind kind : plan.solvers) {
        SolverConfig run_cfg = cfg;
        if (kind == SolverKind::Fpia && plan.fpia_fault_runs.count(run))
          run_cfg.inject_svd_failure_at = 1;
        SolveResult res = run_solver(kind, inst.problem, run_cfg, inst.X0);
        RunRecord rec;
        rec.solver = kind;
        rec.p = p;
        rec.run = run;
        rec.status = res.status;
        rec.message = res.message;
        if (!res.trace.records.empty()) {
          const TraceRecord& last = res.trace.records.back();
          rec.iterations = last.k;
          rec.rel = last.rel;
          rec.fva = last.F;
          rec.tim = last.ms / 1000.0;
        }
        rec.dis = res.last_dist().value_or(std::nan(""));
        rec.trace = std::move(res.trace);
        if (progress) progress(rec);
        result.runs.push_back(std::move(rec));
      }
    }
  }
  result.rows = summarize(plan, result.runs);
  return result;
}

std::vector<SummaryRow> summarize(const ExperimentPlan& plan, const std::vector<RunRecord>& runs) {
  std::vector<SummaryRow> rows;
  for (double p : plan.p_list) {
    for (SolverKind kind : plan.solvers) {
      SummaryRow row;
      row.solver = solver_name(kind);
      row.p = p;
      row.epsilon = plan.epsilon_for(p);
      double dis = 0, rel = 0, fva = 0, tim = 0;
      for (const RunRecord& r : runs) {
        if (r.solver != kind || std::abs(r.p - p) > 1e-12 || !r.success()) continue;
        ++row.num;
        dis += r.dis;
        rel += r.rel;
        fva += r.fva;
        tim += r.tim;
      }
      if (row.num > 0) {
        row.dis = dis / row.num;
        row.rel = rel / row.num;
        row.fva = fva / row.num;
        row.tim = tim / row.num;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_summary_markdown(std::ostream& os, const ExperimentPlan& plan,
                            const std::vector<SummaryRow>& rows) {
  os << "# Summary: m = " << plan.m << ", n = " << plan.n << ", lambda = " << fmt("%g", plan.lambda())
     << ", runs = " << plan.runs << "\n";
  double current = -1.0;
  for (const SummaryRow& r : rows) {
    if (r.p != current) {
      current = r.p;
      os << "\n## p = " << p_label(r.p) << ", epsilon = " << fmt("%.1e", r.epsilon) << "\n\n"
         << "| Solver | Num. | Dis. | Rel. | Fva. | Tim. (s) |\n"
         << "|---|---|---|---|---|---|\n";
    }
    os << "| " << r.solver << " | " << r.num << " | " << cell(r.dis, "%.2e") << " | "
       << cell(r.rel, "%.2e") << " | " << cell(r.fva, "%.4e") << " | " << cell(r.tim, "%.3f")
       << " |\n";
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "solver,p,epsilon,num,dis,rel,fva,tim\n";
  for (const SummaryRow& r : rows)
    os << r.solver << ',' << fmt("%.17g", r.p) << ',' << fmt("%.17g", r.epsilon) << ',' << r.num
       << ',' << cell(r.dis, "%.17g") << ',' << cell(r.rel, "%.17g") << ','
       << cell(r.fva, "%.17g") << ',' << cell(r.tim, "%.6f") << '\n';
}

void write_experiment(const std::string& dir, const ExperimentPlan& plan,
                      const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "traces");
  {
    std::ofstream md(root / "summary.md");
    write_summary_markdown(md, plan, result.rows);
  }
  {
    std::ofstream csv(root / "summary.csv");
    write_summary_csv(csv, result.rows);
  }
  for (const RunRecord& r : result.runs) {
    const std::string name = std::string(solver_slug(r.solver)) + "_p" + p_label(r.p) + "_run" +
                             std::to_string(r.run) + ".csv";
    std::ofstream out(root / "traces" / name);
    write_trace_csv(out, r.trace);
  }
  if (!fs::exists(root / "summary.csv")) throw ParseError("could not write results under " + dir);
}

ExperimentPlan parse_plan_config(std::istream& in) {
  ExperimentPlan plan;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "m") plan.m = to_long(key, val);
    else if (key == "n") plan.n = to_long(key, val);
    else if (key == "p") {
      plan.p_list.clear();
      for (const auto& s : split_list(val)) plan.p_list.push_back(to_double(key, s));
    } else if (key == "eps") {
      // "eps = 5e-6" applies to every p; "eps = 1:5e-6, 0.5:5e-2" sets per-p values.
      for (const auto& s : split_list(val)) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) {
          for (double p : plan.p_list) plan.epsilon_by_p[p] = to_double(key, s);
        } else {
          plan.epsilon_by_p[to_double(key, trim(s.substr(0, colon)))] =
              to_double(key, trim(s.substr(colon + 1)));
        }
      }
    } else if (key == "runs") plan.runs = static_cast<int>(to_long(key, val));
    else if (key == "seed") plan.seed_base = static_cast<std::uint64_t>(to_long(key, val));
    else if (key == "solvers") {
      plan.solvers.clear();
      for (const auto& s : split_list(val)) plan.solvers.push_back(parse_solver(s));
    } else if (key == "density_A") plan.density_A = to_double(key, val);
    else if (key == "density_b") plan.density_b = to_double(key, val);
    else if (key == "density_X0") plan.density_X0 = to_double(key, val);
    else if (key == "lambda_scale") plan.lambda_scale = to_double(key, val);
    else if (key == "max_iter") plan.solver.max_iter = to_long(key, val);
    else if (key == "check_every") plan.solver.check_every = to_long(key, val);
    else if (key == "alpha") plan.solver.alpha = to_double(key, val);
    else if (key == "rho_t") plan.solver.rho_t = to_double(key, val);
    else if (key == "rho_s") plan.solver.rho_s_base = to_double(key, val);
    else if (key == "mu") plan.solver.mu = to_double(key, val);
    else throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return plan;
}

ExperimentPlan load_plan_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_plan_config(in);
}

}  // namespace schatten
