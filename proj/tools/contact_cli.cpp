#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "contact/bench.hpp"
#include "contact/inverse_dynamics.hpp"
#include "contact/problem_io.hpp"
#include "contact/scene_io.hpp"
#include "contact/solver_admm.hpp"
#include "contact/solver_pgs.hpp"

using namespace contact;

namespace {

constexpr int kExitMaxIter = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitBadJson = 4;

// Parse errors keep the file name for the diagnostic.
struct FileParseError : ParseError {
  FileParseError(const ParseError &e, std::string file)
      : ParseError(e), file(std::move(file)) {}
  std::string file;
};

nlohmann::json load(const std::string &path) {
  try {
    return read_json_file(path);
  } catch (const ParseError &e) {
    throw FileParseError(e, path);
  }
}

int status_code(Status s) {
  switch (s) {
  case Status::Converged:
    return 0;
  case Status::MaxIter:
    return kExitMaxIter;
  case Status::NumericalFailure:
    return kExitNumerical;
  }
  return 1;
}

struct SolveArgs {
  std::string problem;
  std::string solver = "admm";
  std::string strategy = "spectral";
  double eps = 1e-6;
  int max_iter = -1;
  double eta = 1e-6;
  double tau = 2.0;
  double p = 0.05;
  double omega = 1.0;
  bool ccp = false;
  bool warm = false;
  std::string trace;
  std::string out;
};

int run_solve(const SolveArgs &a) {
  const ContactProblem problem = problem_from_json(load(a.problem));
  SolverSettings s = a.solver == "pgs" ? pgs_default_settings() : SolverSettings{};
  s.eps_abs = a.eps;
  s.eta = a.eta;
  if (a.max_iter >= 0)
    s.max_iter = a.max_iter;
  if (a.strategy == "linear")
    s.strategy = LinearRule{a.tau, a.tau};
  else
    s.strategy = SpectralRule{a.p, a.p, 0.0};
  s.desaxce = !a.ccp;
  s.record_trace = !a.trace.empty();
  if (a.warm)
    s.warm_start_policy = WarmStartPolicy::Provided;

  const SolverResult r = a.solver == "pgs" ? solve_pgs(problem, s, a.omega)
                                           : solve_admm(problem, s);
  const ResidualReport check = check_ncp(problem, r.lambda, s.desaxce);
  std::printf("status: %s\n", to_string(r.status).c_str());
  std::printf("iterations: %d\n", r.iterations);
  std::printf("cholesky_updates: %d\n", r.cholesky_updates);
  if (r.failure_iteration >= 0)
    std::printf("failure_iteration: %d\n", r.failure_iteration);
  std::printf("r_prim: %s\nr_dual: %s\nr_comp: %s\n",
              format_double(r.r_prim).c_str(), format_double(r.r_dual).c_str(),
              format_double(r.r_comp).c_str());
  std::printf("max_violation: %s\n", format_double(check.max_violation).c_str());
  std::printf("lambda: %s\n", format_vector(r.lambda).c_str());

  if (!a.trace.empty()) {
    std::ofstream f(a.trace);
    write_trace_csv(f, r.trace);
  }
  if (!a.out.empty())
    std::ofstream(a.out) << "{\"lambda\": " << format_vector(r.lambda) << "}\n";
  return status_code(r.status);
}

int run_verify(const std::string &problem_path, const std::string &lambda_path,
               double tol, bool ccp) {
  const ContactProblem problem = problem_from_json(load(problem_path));
  const VectorXd lambda = vector_from_json(load(lambda_path), "lambda");
  const ResidualReport r = check_ncp(problem, lambda, !ccp);
  std::printf("contact,signorini_comp,primal_cone,dual_cone,ncp_comp\n");
  for (long i = 0; i < problem.num_contacts(); ++i)
    std::printf("%ld,%s,%s,%s,%s\n", i,
                format_double(r.signorini_comp[i]).c_str(),
                format_double(r.primal_cone_violation[i]).c_str(),
                format_double(r.dual_cone_violation[i]).c_str(),
                format_double(r.ncp_comp[i]).c_str());
  const bool ok = r.max_violation <= tol;
  std::printf("max_violation: %s (%s, tol %g)\n",
              format_double(r.max_violation).c_str(), ok ? "ok" : "violated",
              tol);
  return ok ? 0 : 1;
}

int run_simulate(const std::string &scene_path, int steps,
                 const std::string &out_path) {
  SimulationConfig cfg = simulation_from_json(load(scene_path));
  if (steps >= 0)
    cfg.steps = steps;
  std::ofstream file;
  std::ostream *out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    out = &file;
  }
  Simulator sim(cfg.scene, cfg.options);
  write_trajectory_header(*out);
  std::map<Status, long> counts;
  long iterations = 0, updates = 0;
  for (int k = 0; k < cfg.steps; ++k) {
    const StepRecord &rec = sim.step();
    ++counts[rec.result.status];
    iterations += rec.result.iterations;
    updates += rec.result.cholesky_updates;
    write_trajectory_rows(*out, k, sim.scene(), rec);
  }
  if (!out_path.empty()) {
    std::printf("steps: %d\n", cfg.steps);
    for (const auto &[s, n] : counts)
      std::printf("%s: %ld\n", to_string(s).c_str(), n);
    std::printf("iterations: %ld\ncholesky_updates: %ld\n", iterations,
                updates);
  }
  return 0;
}

int run_bench(const std::string &dir, const std::string &strategies_path,
              const std::string &out_path, int threads) {
  const auto problems = load_problem_dir(dir);
  const auto strategies = strategies_path.empty()
                              ? ablation_strategies()
                              : strategies_from_json(load(strategies_path));
  const BenchReport report = run_ablation(problems, strategies, threads);
  std::printf("%zu problems, %zu strategies\n", problems.size(),
              strategies.size());
  std::printf("%-18s %5s %18s %20s\n", "solver", "runs", "cholesky_updates",
              "time_ms");
  for (const auto &s : report.summary)
    std::printf("%-18s %5d %8.2f +- %6.2f %9.3f +- %7.3f\n", s.solver.c_str(),
                s.runs, s.cholesky_mean, s.cholesky_std, s.time_mean_ms,
                s.time_std_ms);
  if (!out_path.empty())
    std::ofstream(out_path) << report_to_json(report).dump(2) << '\n';
  return 0;
}

int run_suite(const std::string &dir, int count, double ratio) {
  std::filesystem::create_directories(dir);
  for (const auto &[name, problem] : make_stack_suite(count, ratio))
    write_problem(std::filesystem::path(dir) / (name + ".json"), problem);
  std::printf("wrote %d problems to %s\n", count, dir.c_str());
  return 0;
}

int run_id(const std::string &path, double eps, int max_iter, bool ccp) {
  const IdCase c = id_case_from_json(load(path));
  const IdResult r = solve_id(c.problem, max_iter, eps, !ccp);
  std::printf("status: %s\n", to_string(r.status).c_str());
  std::printf("iterations: %d\n", r.iterations);
  std::printf("lambda: %s\n", format_vector(r.lambda).c_str());
  if (r.status != IdStatus::Diverged) {
    std::printf("id_ncp_violation: %s\n",
                format_double(check_id_ncp(c.problem, r.lambda, !ccp)
                                  .max_violation)
                    .c_str());
    if (c.has_dynamics)
      std::printf("tau: %s\n",
                  format_vector(recover_torque(c.M, c.b, c.v, c.problem.v_ref,
                                               c.dt, c.problem.J, r.lambda))
                      .c_str());
  }
  switch (r.status) {
  case IdStatus::Converged:
    return 0;
  case IdStatus::MaxIter:
    return kExitMaxIter;
  case IdStatus::Diverged:
    return kExitNumerical;
  }
  return 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Frictional contact solvers: ADMM and PGS on the contact NCP"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto *solve = app.add_subcommand("solve", "solve a contact problem file");
  solve->add_option("problem", sa.problem, "problem JSON")->required();
  solve->add_option("--solver", sa.solver)
      ->check(CLI::IsMember({"admm", "pgs"}))
      ->capture_default_str();
  solve->add_option("--strategy", sa.strategy, "ADMM penalty update rule")
      ->check(CLI::IsMember({"linear", "spectral"}))
      ->capture_default_str();
  solve->add_option("--eps", sa.eps)->capture_default_str();
  solve->add_option("--max-iter", sa.max_iter,
                    "iteration cap (default 1000 ADMM, 20000 PGS)");
  solve->add_option("--eta", sa.eta)->capture_default_str();
  solve->add_option("--tau", sa.tau, "linear rule factor")->capture_default_str();
  solve->add_option("--p", sa.p, "spectral exponent step")->capture_default_str();
  solve->add_option("--omega", sa.omega, "PGS relaxation")->capture_default_str();
  solve->add_flag("--ccp", sa.ccp, "drop the De Saxce correction");
  solve->add_flag("--warm", sa.warm, "start from the file's warm_start");
  solve->add_option("--trace", sa.trace, "residual trace CSV");
  solve->add_option("--out", sa.out, "write lambda as JSON");

  std::string v_problem, v_lambda;
  double v_tol = 1e-6;
  bool v_ccp = false;
  auto *verify = app.add_subcommand("verify", "check a candidate impulse");
  verify->add_option("problem", v_problem)->required();
  verify->add_option("lambda", v_lambda, "JSON array or {\"lambda\": [...]}")
      ->required();
  verify->add_option("--tol", v_tol)->capture_default_str();
  verify->add_flag("--ccp", v_ccp, "check the cone complementarity relaxation");

  std::string s_scene, s_out;
  int s_steps = -1;
  auto *simulate = app.add_subcommand("simulate", "run a scene file");
  simulate->add_option("scene", s_scene)->required();
  simulate->add_option("--steps", s_steps, "overrides the scene's step count");
  simulate->add_option("--out", s_out, "trajectory CSV (stdout if omitted)");

  std::string b_dir, b_strategies, b_out;
  int b_threads = 0;
  auto *bench = app.add_subcommand("bench", "benchmark a directory of problems");
  bench->add_option("dir", b_dir)->required()->check(CLI::ExistingDirectory);
  bench->add_option("--strategies", b_strategies, "strategy list JSON");
  bench->add_option("--out", b_out, "report JSON");
  bench->add_option("--threads", b_threads, "0 = OpenMP default");

  std::string g_dir;
  int g_count = 20;
  double g_ratio = 1e4;
  auto *suite = app.add_subcommand("suite", "write the stack problem suite");
  suite->add_option("dir", g_dir)->required();
  suite->add_option("--count", g_count)->capture_default_str();
  suite->add_option("--max-ratio", g_ratio)->capture_default_str();

  std::string i_path;
  double i_eps = 1e-6;
  int i_max_iter = 1000;
  bool i_ccp = false;
  auto *id = app.add_subcommand("id", "contact inverse dynamics");
  id->add_option("problem", i_path)->required();
  id->add_option("--eps", i_eps)->capture_default_str();
  id->add_option("--max-iter", i_max_iter)->capture_default_str();
  id->add_flag("--ccp", i_ccp, "drop the De Saxce correction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve)
      return run_solve(sa);
    if (*verify)
      return run_verify(v_problem, v_lambda, v_tol, v_ccp);
    if (*simulate)
      return run_simulate(s_scene, s_steps, s_out);
    if (*bench)
      return run_bench(b_dir, b_strategies, b_out, b_threads);
    if (*suite)
      return run_suite(g_dir, g_count, g_ratio);
    if (*id)
      return run_id(i_path, i_eps, i_max_iter, i_ccp);
  } catch (const FileParseError &e) {
    std::fprintf(stderr, "%s:%zu:%zu: %s\n", e.file.c_str(), e.line(),
                 e.column(), e.what());
    return kExitBadJson;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
