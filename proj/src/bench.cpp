#include "contact/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include "contact/problem_io.hpp"
#include "contact/solver_admm.hpp"
#include "contact/solver_pgs.hpp"

namespace contact {

using nlohmann::json;

std::vector<ProfileCurve>
performance_profile(const std::vector<std::vector<double>> &times,
                    const std::vector<std::vector<bool>> &solved,
                    const std::vector<std::string> &names, int n_points,
                    double tau_max) {
  const std::size_t ns = times.size();
  if (solved.size() != ns || (!names.empty() && names.size() != ns))
    throw std::invalid_argument("performance_profile: shape mismatch");
  if (n_points < 2 || !(tau_max > 1.0))
    throw std::invalid_argument("performance_profile: bad tau grid");
  const std::size_t np = ns ? times[0].size() : 0;
  for (std::size_t s = 0; s < ns; ++s)
    if (times[s].size() != np || solved[s].size() != np)
      throw std::invalid_argument("performance_profile: ragged input");

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> ratio(ns, std::vector<double>(np, inf));
  for (std::size_t p = 0; p < np; ++p) {
    double best = inf;
    for (std::size_t s = 0; s < ns; ++s)
      if (solved[s][p])
        best = std::min(best, times[s][p]);
    if (best == inf)
      continue;
    for (std::size_t s = 0; s < ns; ++s)
      if (solved[s][p])
        ratio[s][p] = best > 0.0 ? times[s][p] / best : 1.0;
  }

  std::vector<ProfileCurve> curves(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    curves[s].solver = names.empty() ? "solver" + std::to_string(s) : names[s];
    for (int k = 0; k < n_points; ++k) {
      const double tau =
          k == n_points - 1
              ? tau_max
              : std::pow(tau_max, static_cast<double>(k) / (n_points - 1));
      const auto count =
          std::count_if(ratio[s].begin(), ratio[s].end(),
                        [&](double r) { return r <= tau; });
      curves[s].points.push_back(
          {tau, np ? static_cast<double>(count) / np : 0.0});
    }
  }
  return curves;
}

std::vector<BenchStrategy> ablation_strategies(double eps_abs) {
  std::vector<BenchStrategy> out;
  for (double tau : {2.0, 4.0, 8.0, 16.0}) {
    BenchStrategy s;
    s.name = "linear_tau" + std::to_string(static_cast<int>(tau));
    s.settings.eps_abs = eps_abs;
    s.settings.strategy = LinearRule{tau, tau};
    out.push_back(s);
  }
  for (auto [label, p] : {std::pair{"0.01", 0.01}, std::pair{"0.05", 0.05},
                          std::pair{"0.08", 0.08}}) {
    BenchStrategy s;
    s.name = std::string("spectral_p") + label;
    s.settings.eps_abs = eps_abs;
    s.settings.strategy = SpectralRule{p, p, 0.0};
    out.push_back(s);
  }
  return out;
}

BenchReport run_ablation(const std::vector<NamedProblem> &problems,
                         const std::vector<BenchStrategy> &strategies,
                         int threads) {
  BenchReport report;
  const long np = static_cast<long>(problems.size());
  const long ns = static_cast<long>(strategies.size());
  if (np == 0 || ns == 0)
    return report;

  // Slot per (strategy, problem); workers never share a slot.
  std::vector<BenchEntry> entries(np * ns);
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long task = 0; task < np * ns; ++task) {
    const long s = task / np, p = task % np;
    const BenchStrategy &strategy = strategies[s];
    const ContactProblem &problem = problems[p].second;
    const auto start = std::chrono::steady_clock::now();
    const SolverResult r =
        strategy.solver == SolverKind::Pgs
            ? solve_pgs(problem, strategy.settings, strategy.omega)
            : solve_admm(problem, strategy.settings);
    const auto stop = std::chrono::steady_clock::now();
    BenchEntry &e = entries[task];
    e.problem = problems[p].first;
    e.solver = strategy.name;
    e.status = r.status;
    e.iterations = r.iterations;
    e.time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    e.cholesky_updates = r.cholesky_updates;
    e.r_prim = r.r_prim;
    e.r_dual = r.r_dual;
    e.r_comp = r.r_comp;
  }
  report.per_problem = std::move(entries);

  std::vector<std::vector<double>> times(ns, std::vector<double>(np));
  std::vector<std::vector<bool>> solved(ns, std::vector<bool>(np));
  std::vector<std::string> names;
  for (long s = 0; s < ns; ++s) {
    names.push_back(strategies[s].name);
    BenchSummary sum;
    sum.solver = strategies[s].name;
    std::vector<double> chol, ms;
    for (long p = 0; p < np; ++p) {
      const BenchEntry &e = report.per_problem[s * np + p];
      times[s][p] = e.time_ms;
      solved[s][p] = e.status == Status::Converged;
      if (e.status == Status::NumericalFailure)
        continue;
      chol.push_back(e.cholesky_updates);
      ms.push_back(e.time_ms);
    }
    auto mean_std = [](const std::vector<double> &v) {
      if (v.empty())
        return std::pair{0.0, 0.0};
      double mean = 0.0;
      for (double x : v)
        mean += x;
      mean /= v.size();
      double var = 0.0;
      for (double x : v)
        var += (x - mean) * (x - mean);
      return std::pair{mean, std::sqrt(var / v.size())};
    };
    sum.runs = static_cast<int>(chol.size());
    std::tie(sum.cholesky_mean, sum.cholesky_std) = mean_std(chol);
    std::tie(sum.time_mean_ms, sum.time_std_ms) = mean_std(ms);
    report.summary.push_back(sum);
  }
  report.profile_curves = performance_profile(times, solved, names);
  return report;
}

std::vector<NamedProblem> make_stack_suite(int count, double max_ratio,
                                           double dt) {
  std::vector<NamedProblem> out;
  for (int k = 0; k < count; ++k) {
    const double ratio =
        count == 1 ? 1.0
                   : std::pow(max_ratio, static_cast<double>(k) / (count - 1));
    const int layers = 2 + k % 5;
    const Scene scene = make_stack_scene(layers, ratio);
    StepProblem sp =
        assemble_step_problem(scene, detect_contacts(scene), VectorXd(), dt);
    out.emplace_back("stack" + std::to_string(k) + "_l" +
                         std::to_string(layers),
                     std::move(sp.problem));
  }
  return out;
}

std::vector<NamedProblem> load_problem_dir(const std::filesystem::path &dir) {
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedProblem> out;
  for (const auto &f : files)
    out.emplace_back(f.stem().string(), read_problem(f));
  return out;
}

namespace {

Status status_from_string(const std::string &s) {
  if (s == "Converged")
    return Status::Converged;
  if (s == "MaxIter")
    return Status::MaxIter;
  if (s == "NumericalFailure")
    return Status::NumericalFailure;
  throw std::invalid_argument("report: unknown status \"" + s + "\"");
}

} // namespace

json report_to_json(const BenchReport &report) {
  json j;
  j["per_problem"] = json::array();
  for (const auto &e : report.per_problem)
    j["per_problem"].push_back({{"problem", e.problem},
                                {"solver", e.solver},
                                {"status", to_string(e.status)},
                                {"iterations", e.iterations},
                                {"time_ms", e.time_ms},
                                {"cholesky_updates", e.cholesky_updates},
                                {"r_prim", e.r_prim},
                                {"r_dual", e.r_dual},
                                {"r_comp", e.r_comp}});
  j["profile_curves"] = json::array();
  for (const auto &c : report.profile_curves) {
    json pts = json::array();
    for (const auto &pt : c.points)
      pts.push_back({pt.tau, pt.fraction});
    j["profile_curves"].push_back({{"solver", c.solver}, {"points", pts}});
  }
  j["summary"] = json::array();
  for (const auto &s : report.summary)
    j["summary"].push_back({{"solver", s.solver},
                            {"runs", s.runs},
                            {"cholesky_mean", s.cholesky_mean},
                            {"cholesky_std", s.cholesky_std},
                            {"time_mean_ms", s.time_mean_ms},
                            {"time_std_ms", s.time_std_ms}});
  return j;
}

BenchReport report_from_json(const json &j) {
  BenchReport r;
  for (const auto &e : j.at("per_problem"))
    r.per_problem.push_back({e.at("problem").get<std::string>(),
                             e.at("solver").get<std::string>(),
                             status_from_string(e.at("status")),
                             e.at("iterations").get<int>(),
                             e.at("time_ms").get<double>(),
                             e.at("cholesky_updates").get<int>(),
                             e.at("r_prim").get<double>(),
                             e.at("r_dual").get<double>(),
                             e.at("r_comp").get<double>()});
  for (const auto &c : j.at("profile_curves")) {
    ProfileCurve curve;
    curve.solver = c.at("solver").get<std::string>();
    for (const auto &pt : c.at("points"))
      curve.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
    r.profile_curves.push_back(std::move(curve));
  }
  for (const auto &s : j.at("summary"))
    r.summary.push_back({s.at("solver").get<std::string>(),
                         s.at("runs").get<int>(),
                         s.at("cholesky_mean").get<double>(),
                         s.at("cholesky_std").get<double>(),
                         s.at("time_mean_ms").get<double>(),
                         s.at("time_std_ms").get<double>()});
  return r;
}

std::vector<BenchStrategy> strategies_from_json(const json &j) {
  std::vector<BenchStrategy> out;
  for (const auto &item : j.at("strategies")) {
    BenchStrategy s;
    s.name = item.at("name").get<std::string>();
    const std::string kind = item.value("strategy", std::string("spectral"));
    if (kind == "pgs") {
      s.solver = SolverKind::Pgs;
      s.settings.max_iter = 20000;
      s.omega = item.value("omega", 1.0);
    } else if (kind == "linear") {
      const double tau = item.value("tau", 2.0);
      s.settings.strategy =
          LinearRule{item.value("tau_inc", tau), item.value("tau_dec", tau)};
    } else if (kind == "spectral") {
      const double p = item.value("p", 0.05);
      s.settings.strategy = SpectralRule{item.value("p_inc", p),
                                         item.value("p_dec", p),
                                         item.value("p_init", 0.0)};
    } else {
      throw std::invalid_argument("strategies: unknown strategy \"" + kind +
                                  "\"");
    }
    s.settings.eps_abs = item.value("eps", s.settings.eps_abs);
    s.settings.max_iter = item.value("max_iter", s.settings.max_iter);
    s.settings.eta = item.value("eta", s.settings.eta);
    s.settings.alpha = item.value("alpha", s.settings.alpha);
    s.settings.validate();
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace contact
