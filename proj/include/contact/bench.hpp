#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contact/problem.hpp"
#include "contact/scene.hpp"
#include "contact/solver.hpp"

namespace contact {

struct ProfilePoint {
  double tau;
  double fraction;
  bool operator==(const ProfilePoint &) const = default;
};

struct ProfileCurve {
  std::string solver;
  std::vector<ProfilePoint> points;
  bool operator==(const ProfileCurve &) const = default;
};

/// Dolan-More performance profiles. times[s][p] is the cost of solver s on
/// problem p; solved[s][p] false counts as an infinite ratio. Each curve is
/// sampled on a log grid of n_points values of tau in [1, tau_max].
std::vector<ProfileCurve>
performance_profile(const std::vector<std::vector<double>> &times,
                    const std::vector<std::vector<bool>> &solved,
                    const std::vector<std::string> &names = {},
                    int n_points = 50, double tau_max = 100.0);

/// A named solver configuration for benchmarking.
struct BenchStrategy {
  std::string name;
  SolverKind solver = SolverKind::Admm;
  SolverSettings settings;
  double omega = 1.0;
};

/// The ablation grid: Linear tau in {2, 4, 8, 16}, Spectral p in
/// {0.01, 0.05, 0.08}.
std::vector<BenchStrategy> ablation_strategies(double eps_abs = 1e-6);

struct BenchEntry {
  std::string problem;
  std::string solver;
  Status status = Status::Converged;
  int iterations = 0;
  double time_ms = 0.0;
  int cholesky_updates = 0;
  double r_prim = 0.0;
  double r_dual = 0.0;
  double r_comp = 0.0;
  bool operator==(const BenchEntry &) const = default;
};

struct BenchSummary {
  std::string solver;
  int runs = 0;
  double cholesky_mean = 0.0;
  double cholesky_std = 0.0;
  double time_mean_ms = 0.0;
  double time_std_ms = 0.0;
  bool operator==(const BenchSummary &) const = default;
};

struct BenchReport {
  std::vector<BenchEntry> per_problem;
  std::vector<ProfileCurve> profile_curves;
  std::vector<BenchSummary> summary;
  bool operator==(const BenchReport &) const = default;
};

using NamedProblem = std::pair<std::string, ContactProblem>;

/// Solves every problem under every strategy, problem-level parallel over
/// `threads` OpenMP workers (0 = runtime default). Wall time covers the solve
/// call only. Summary statistics (population std) cover Converged and MaxIter
/// runs; profiles count anything but Converged as unsolved.
BenchReport run_ablation(const std::vector<NamedProblem> &problems,
                         const std::vector<BenchStrategy> &strategies,
                         int threads = 0);

/// Resting stacks (2 to 6 layers) with mass ratios log-spaced over
/// [1, max_ratio]; each problem is the first step of its scene.
std::vector<NamedProblem> make_stack_suite(int count = 20,
                                           double max_ratio = 1e4,
                                           double dt = 1e-3);

/// All *.json problem files in a directory, sorted by name.
std::vector<NamedProblem> load_problem_dir(const std::filesystem::path &dir);

nlohmann::json report_to_json(const BenchReport &report);
BenchReport report_from_json(const nlohmann::json &j);
std::vector<BenchStrategy> strategies_from_json(const nlohmann::json &j);

} // namespace contact
