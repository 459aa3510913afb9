// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "contact/bench.hpp"
#include "contact/cones.hpp"
#include "contact/inverse_dynamics.hpp"
#include "contact/scene.hpp"
#include "contact/solver_admm.hpp"
#include "contact/solver_pgs.hpp"
#include "oracles.hpp"

using namespace contact;
using Eigen::Vector3d;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double inf_norm(const VectorXd &v) { return v.lpNorm<Eigen::Infinity>(); }

Body unit_box(double mass, const Vector3d &pos, const Vector3d &vel = {0, 0, 0}) {
  return {mass, pos, vel, BoxShape{Vector3d::Constant(0.5)}};
}

Scene sliding_block_scene() {
  Scene scene;
  scene.friction_mu = 0.3;
  // wide enough that a block lifted by the relaxed model stays in contact
  scene.margin = 1e-2;
  scene.bodies.push_back(unit_box(1.0, {0, 0, 0.5}, {1, 0, 0}));
  return scene;
}

StepOptions admm_options(double eps) {
  StepOptions o;
  o.settings.eps_abs = eps;
  o.settings.max_iter = 5000;
  return o;
}

// 1 -----------------------------------------------------------------------
Outcome analytic_statics() {
  Scene scene;
  scene.bodies.push_back({1.0, {0, 0, 0}, {0, 0, 0}, PointShape{}});
  const StepProblem sp =
      assemble_step_problem(scene, detect_contacts(scene), VectorXd(), 1e-3);
  SolverSettings s;
  s.eps_abs = 1e-10;
  SolverSettings sp_pgs = pgs_default_settings();
  sp_pgs.eps_abs = 1e-10;

  auto t0 = Clock::now();
  const auto ra = solve_admm(sp.problem, s);
  const double ta = ms_since(t0);
  t0 = Clock::now();
  const auto rp = solve_pgs(sp.problem, sp_pgs);
  const double tp = ms_since(t0);

  const double ea = std::abs(ra.lambda[2] - 9.81e-3);
  const double ep = std::abs(rp.lambda[2] - 9.81e-3);
  const double tan = std::max(ra.lambda.head<2>().cwiseAbs().maxCoeff(),
                              rp.lambda.head<2>().cwiseAbs().maxCoeff());
  const bool ok = ra.status == Status::Converged &&
                  rp.status == Status::Converged && ea <= 1e-8 && ep <= 1e-8 &&
                  tan <= 1e-8 && ta < 1.0 && tp < 1.0;
  return {ok, fmt("|dlambda_N| admm %.1e pgs %.1e, |lambda_T| %.1e, "
                  "time admm %.3f ms pgs %.3f ms",
                  ea, ep, tan, ta, tp)};
}

// 2 -----------------------------------------------------------------------
Outcome coulomb_kinetics() {
  const auto t0 = Clock::now();
  Simulator sim(sliding_block_scene(), admm_options(1e-9));
  const double dt = sim.options().dt;
  const double expected = 0.3 * 9.81;
  double v_prev = 1.0, worst_rel = 0.0, after_stop = 0.0;
  int stop = -1, sliding = 0;
  bool converged = true;
  for (int k = 0; k < 1000; ++k) {
    converged &= sim.step().result.status == Status::Converged;
    const double v = sim.scene().bodies[0].velocity.head<2>().norm();
    if (stop < 0 && v > 1e-6) {
      worst_rel = std::max(worst_rel,
                           std::abs((v_prev - v) / dt - expected) / expected);
      ++sliding;
    } else if (stop < 0) {
      stop = k;
    } else {
      after_stop = std::max(after_stop, v);
    }
    v_prev = v;
  }
  const double ms = ms_since(t0);
  const bool ok = converged && stop > 0 && worst_rel <= 0.02 &&
                  after_stop <= 1e-6 && ms < 1000.0;
  return {ok, fmt("worst per-step deceleration error %.2e (rel), %d sliding "
                  "steps, stop at step %d, max |v| after stop %.1e, %.0f ms",
                  worst_rel, sliding, stop, after_stop, ms)};
}

// 3 -----------------------------------------------------------------------
Outcome exact_signorini() {
  double ncp_worst = 0.0;
  bool converged = true;
  {
    Simulator sim(sliding_block_scene(), admm_options(1e-9));
    for (int k = 0; k < 1000; ++k) {
      const auto &rec = sim.step();
      converged &= rec.result.status == Status::Converged;
      const VectorXd sigma = rec.assembled.problem.velocity(rec.result.lambda);
      for (long i = 0; i < rec.assembled.problem.num_contacts(); ++i)
        ncp_worst = std::max(ncp_worst, std::abs(sigma[3 * i + 2]));
    }
  }
  int sliding = 0, lifted = 0;
  {
    StepOptions o = admm_options(1e-9);
    o.settings.desaxce = false;
    Simulator sim(sliding_block_scene(), o);
    for (int k = 0; k < 1000; ++k) {
      const auto &rec = sim.step();
      converged &= rec.result.status == Status::Converged;
      if (sim.scene().bodies[0].velocity.head<2>().norm() <= 1e-6)
        break;
      ++sliding;
      const VectorXd sigma = rec.assembled.problem.velocity(rec.result.lambda);
      double min_n = 1e300;
      for (long i = 0; i < rec.assembled.problem.num_contacts(); ++i)
        min_n = std::min(min_n, sigma[3 * i + 2]);
      lifted += rec.assembled.problem.num_contacts() > 0 && min_n > 1e-3;
    }
  }
  const double frac = sliding ? static_cast<double>(lifted) / sliding : 0.0;
  const bool ok = converged && ncp_worst <= 1e-5 && sliding > 0 && frac >= 0.9;
  return {ok, fmt("NCP max |sigma_N| %.1e; CCP sigma_N > 1e-3 on %d/%d "
                  "sliding steps (%.1f%%)",
                  ncp_worst, lifted, sliding, 100 * frac)};
}

// 4 -----------------------------------------------------------------------
Outcome ill_conditioning() {
  const auto t0 = Clock::now();
  StepOptions o;
  o.settings.eps_abs = 1e-9;
  o.settings.max_iter = 1000;
  o.settings.strategy = SpectralRule{};
  Simulator sim(make_stack_scene(6, 1e4), o);
  std::vector<ContactProblem> problems;
  int converged = 0;
  long min_contacts = 1 << 30;
  const int steps = 500;
  for (int k = 0; k < steps; ++k) {
    const auto &rec = sim.step();
    converged += rec.result.status == Status::Converged;
    min_contacts = std::min(min_contacts, rec.assembled.problem.num_contacts());
    problems.push_back(rec.assembled.problem);
  }
  SolverSettings pgs = pgs_default_settings();
  pgs.eps_abs = 1e-9;
  int capped = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : capped)
  for (int k = 0; k < steps; ++k)
    capped += solve_pgs(problems[k], pgs).status == Status::MaxIter;
  const double fa = static_cast<double>(converged) / steps;
  const double fp = static_cast<double>(capped) / steps;
  const bool ok = min_contacts >= 20 && fa >= 0.95 && fp >= 0.5;
  return {ok, fmt("%ld contacts; ADMM-spectral converged on %d/%d steps "
                  "(%.1f%%), PGS hit the cap on %d/%d (%.1f%%), %.1f s",
                  min_contacts, converged, steps, 100 * fa, capped, steps,
                  100 * fp, ms_since(t0) / 1000)};
}

// 5 -----------------------------------------------------------------------
Outcome spectral_vs_linear() {
  const auto t0 = Clock::now();
  std::vector<BenchStrategy> strategies;
  for (const auto &s : ablation_strategies())
    if (s.name == "linear_tau2" || s.name == "spectral_p0.05")
      strategies.push_back(s);
  const BenchReport r = run_ablation(make_stack_suite(20), strategies);
  const double ms = ms_since(t0);
  const BenchSummary *lin = nullptr, *spectral = nullptr;
  for (const auto &s : r.summary)
    (s.solver == "linear_tau2" ? lin : spectral) = &s;
  if (!lin || !spectral)
    return {false, "missing summary rows"};
  const bool ok = spectral->runs == 20 && lin->runs == 20 &&
                  spectral->cholesky_mean < lin->cholesky_mean &&
                  spectral->cholesky_std <= lin->cholesky_std && ms < 30000.0;
  return {ok, fmt("cholesky updates: spectral(p=0.05) %.2f +- %.2f, "
                  "linear(tau=2) %.2f +- %.2f, %.2f s",
                  spectral->cholesky_mean, spectral->cholesky_std, lin->cholesky_mean,
                  lin->cholesky_std, ms / 1000)};
}

// 6 -----------------------------------------------------------------------
Outcome hyperstatic() {
  Scene scene;
  scene.bodies.push_back(unit_box(1.0, {0, 0, 0.5}));
  const StepProblem sp =
      assemble_step_problem(scene, detect_contacts(scene), VectorXd(), 1e-3);
  const auto spectrum = estimate_spectrum(sp.problem);
  SolverSettings s;
  s.eps_abs = 1e-6;
  const auto r = solve_admm(sp.problem, s);
  double sum = 0.0;
  for (long i = 0; i < sp.problem.num_contacts(); ++i)
    sum += r.lambda[3 * i + 2];
  const double err = std::abs(sum - 9.81e-3);
  const bool ok = sp.problem.num_contacts() == 4 &&
                  r.status == Status::Converged && r.lambda.allFinite() &&
                  err <= 1e-8;
  return {ok, fmt("%s in %d iterations, lambda_min(G) %.1e, "
                  "|sum lambda_N - m g dt| %.1e",
                  to_string(r.status).c_str(), r.iterations, spectrum.m, err)};
}

// 7 -----------------------------------------------------------------------
Outcome forward_inverse() {
  Scene scene;
  scene.friction_mu = 0.5;
  scene.bodies.push_back({2.0, {0, 0, 0}, {1, 0, 0}, PointShape{}});
  const double dt = 1e-3;
  const Vector3d tau(3.0, -1.0, 0.0);
  SolverSettings s;
  s.eps_abs = 1e-13;
  s.max_iter = 10000;
  const VectorXd b = -scene.bodies[0].mass * scene.gravity;

  auto forward = [&](Compliance comp, StepProblem &sp, VectorXd &v_next) {
    sp = assemble_step_problem(scene, detect_contacts(scene), tau, dt, 0.2, comp);
    const auto r = solve_admm(sp.problem, s);
    v_next = sp.v_free + sp.J.transpose() * r.lambda / scene.bodies[0].mass;
    return r;
  };
  auto id_problem = [](const StepProblem &sp, const VectorXd &v_ref) {
    IdProblem id;
    id.v_ref = v_ref;
    id.J = sp.J;
    id.gamma = sp.gamma;
    id.R_diag = sp.problem.R_diag();
    id.mu = sp.problem.mu();
    id.rho = 1e-8;
    return id;
  };

  // compliant contact: the inverse map is unique
  StepProblem sp;
  VectorXd v_next;
  const auto fwd = forward({1e-3, 1e-3}, sp, v_next);
  const IdProblem id = id_problem(sp, v_next);
  const auto inv = solve_id(id, 10000, 1e-14);
  const double dl = inf_norm(inv.lambda - fwd.lambda);
  const VectorXd tau_rec = recover_torque(sp.M_diag.asDiagonal(), b,
                                          scene.bodies[0].velocity, v_next, dt,
                                          id.J, inv.lambda);
  const double rel = (tau_rec - tau).norm() / tau.norm();

  // rigid contact, same scene: the relaxed inverse problem has no solution
  StepProblem sp_rigid;
  VectorXd v_rigid;
  const auto fwd_rigid = forward({}, sp_rigid, v_rigid);
  const IdProblem id_rigid = id_problem(sp_rigid, v_rigid);
  const auto ncp = solve_id(id_rigid, 1000, 1e-6);
  const auto ccp = solve_id(id_rigid, 1000000, 1e-6, false);

  const bool ok = fwd.status == Status::Converged &&
                  inv.status == IdStatus::Converged && v_next[0] > 0.5 &&
                  dl <= 1e-4 && rel <= 1e-6 &&
                  fwd_rigid.status == Status::Converged &&
                  ncp.status == IdStatus::Converged &&
                  ccp.status == IdStatus::Diverged;
  return {ok, fmt("|lambda_fwd - lambda_id| %.1e, torque rel. error %.1e; "
                  "rigid reference: NCP %s, CCP %s after %d iterations",
                  dl, rel, to_string(ncp.status).c_str(),
                  to_string(ccp.status).c_str(), ccp.iterations)};
}

// 8 -----------------------------------------------------------------------
Outcome id_iterations() {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1, 1), umu(0.1, 1.0);
  int worst = 0, failed = 0;
  double worst_res = 0.0;
  const int n = 200;
  for (int k = 0; k < n; ++k) {
    IdProblem p;
    p.J = MatrixXd::Identity(3, 3);
    p.gamma = VectorXd::Zero(3);
    p.R_diag = VectorXd::Zero(3);
    p.mu = VectorXd::Constant(1, umu(rng));
    // sliding, static and separating references (normal velocity >= 0)
    Vector3d c(u(rng), u(rng), 0.0);
    if (k % 4 == 1)
      c.setZero();
    if (k % 4 == 2)
      c[2] = std::abs(u(rng));
    if (k == 0)
      c << -1, 0, 0;
    p.v_ref = c;
    p.rho = 1e-8;
    const auto r = solve_id(p, 100, 1e-6);
    failed += r.status != IdStatus::Converged;
    worst = std::max(worst, r.iterations);
    worst_res = std::max(worst_res, check_id_ncp(p, r.lambda).max_violation);
  }
  const bool ok = failed == 0 && worst <= 2 && worst_res <= 1e-5;
  return {ok, fmt("%d rigid single-contact references, max %d iterations, "
                  "max ID-NCP residual %.1e",
                  n, worst, worst_res)};
}

// 9 -----------------------------------------------------------------------
Outcome cone_geometry() {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1), umu(0.1, 2.0), ud(0.2, 5.0);
  double idem = 0.0, moreau = 0.0, orth = 0.0, expand = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double mu = umu(rng);
    const Vector3d x(u(rng), u(rng), u(rng)), y(u(rng), u(rng), u(rng));
    const Vector3d px = project_soc(x, mu);
    idem = std::max(idem, (project_soc(px, mu) - px).cwiseAbs().maxCoeff());
    // x = P_K(x) - P_K*(-x)
    const Vector3d polar = -project_soc(-x, 1.0 / mu);
    moreau = std::max(moreau, (px + polar - x).cwiseAbs().maxCoeff());
    orth = std::max(orth, std::abs(px.dot(polar)));
    expand = std::max(expand, (px - project_soc(y, mu)).norm() - (x - y).norm());
  }
  double diag = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double mu = umu(rng);
    const Vector3d x(u(rng), u(rng), u(rng));
    const double dt = ud(rng);
    const Vector3d d(dt, dt, ud(rng));
    diag = std::max(diag, (project_soc_diag_metric(x, d, mu) -
                           oracle::projected_gradient_diag_metric(x, d, mu))
                              .cwiseAbs()
                              .maxCoeff());
  }
  const bool ok = idem <= 1e-14 && moreau <= 1e-12 && orth <= 1e-12 &&
                  expand <= 1e-15 && diag <= 1e-8;
  return {ok, fmt("idempotence %.1e, Moreau %.1e (orthogonality %.1e), "
                  "max expansion %.1e; diagonal metric vs projected gradient "
                  "%.1e",
                  idem, moreau, orth, expand, diag)};
}

// 10 ----------------------------------------------------------------------
Outcome oracle_cross_validation() {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(-1, 1), umu(0.1, 1.0);
  double worst_admm = 0.0, worst_pgs = 0.0, worst_pair = 0.0, worst_ncp = 0.0;
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    const Matrix3d G = oracle::random_spd3(rng, 0.5, 2.0);
    const Vector3d g(u(rng), u(rng), u(rng));
    const double mu = umu(rng);
    const ContactProblem p(MatrixXd(G), VectorXd(g), VectorXd::Constant(1, mu));
    SolverSettings sa;
    sa.eps_abs = 1e-10;
    sa.max_iter = 5000;
    SolverSettings sp = pgs_default_settings();
    sp.eps_abs = 1e-10;
    const auto ra = solve_admm(p, sa);
    const auto rp = solve_pgs(p, sp);
    const auto sols = oracle::single_contact_solutions(G, g, mu);
    failures += ra.status != Status::Converged ||
                rp.status != Status::Converged || sols.empty();
    auto nearest = [&](const VectorXd &lam) {
      double best = 1e300;
      for (const auto &s : sols)
        best = std::min(best, (Vector3d(lam) - s).lpNorm<Eigen::Infinity>());
      return best;
    };
    worst_admm = std::max(worst_admm, nearest(ra.lambda));
    worst_pgs = std::max(worst_pgs, nearest(rp.lambda));
    worst_pair = std::max(worst_pair, inf_norm(ra.lambda - rp.lambda));
    worst_ncp = std::max({worst_ncp, check_ncp(p, ra.lambda).max_violation,
                          check_ncp(p, rp.lambda).max_violation});
  }
  const bool ok = failures == 0 && worst_admm <= 1e-4 && worst_pgs <= 1e-4 &&
                  worst_pair <= 1e-4 && worst_ncp <= 1e-5;
  return {ok, fmt("200 problems, %d failures; max distance to oracle: ADMM "
                  "%.1e, PGS %.1e; ADMM-PGS %.1e; max check_ncp %.1e",
                  failures, worst_admm, worst_pgs, worst_pair, worst_ncp)};
}

// 11 ----------------------------------------------------------------------
Outcome compliance_monotonicity() {
  auto penetration = [](double r) {
    Scene scene;
    scene.bodies.push_back(unit_box(1.0, {0, 0, 0.5}));
    StepOptions o = admm_options(1e-13);
    o.compliance = {r, 0.0};
    Simulator sim(scene, o);
    for (int k = 0; k < 500; ++k)
      sim.step();
    return 0.5 - sim.scene().bodies[0].position.z();
  };
  const double p0 = penetration(0.0), p4 = penetration(1e-4),
               p3 = penetration(1e-3), p2 = penetration(1e-2);
  const bool ok = 0.0 < p4 && p4 < p3 && p3 < p2 && std::abs(p0) <= 1e-12 &&
                  p4 / p2 < 0.02;
  return {ok, fmt("penetration R_N=1e-2: %.3e, 1e-3: %.3e, 1e-4: %.3e, "
                  "rigid: %.1e",
                  p2, p3, p4, p0)};
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
      {"analytic statics", analytic_statics},
      {"Coulomb kinetics", coulomb_kinetics},
      {"exact Signorini (NCP vs CCP)", exact_signorini},
      {"ill-conditioning robustness", ill_conditioning},
      {"spectral vs linear rho ablation", spectral_vs_linear},
      {"hyperstatic rigid solve", hyperstatic},
      {"forward/inverse consistency", forward_inverse},
      {"inverse-dynamics iteration count", id_iterations},
      {"cone geometry properties", cone_geometry},
      {"oracle cross-validation", oracle_cross_validation},
      {"compliance monotonicity", compliance_monotonicity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed ? 1 : 0;
}
