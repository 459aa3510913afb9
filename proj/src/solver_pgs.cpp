#include "contact/solver_pgs.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "contact/cones.hpp"
#include "contact/kernels.hpp"

namespace contact {

using Eigen::Vector3d;

namespace {

struct BlockEntry {
  long col;
  Matrix3d block;
};

// Nonzero 3x3 blocks of G + R, row by row.
std::vector<std::vector<BlockEntry>> block_rows(const ContactProblem &problem) {
  const long nc = problem.num_contacts();
  std::vector<std::vector<BlockEntry>> rows(nc);
  if (problem.is_sparse()) {
    const SparseMatrix G = problem.sparse_delassus();
    std::vector<std::vector<long>> cols(nc);
    for (int k = 0; k < G.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(G, k); it; ++it)
        cols[it.row() / 3].push_back(it.col() / 3);
    for (long i = 0; i < nc; ++i) {
      cols[i].push_back(i);
      std::sort(cols[i].begin(), cols[i].end());
      cols[i].erase(std::unique(cols[i].begin(), cols[i].end()), cols[i].end());
      for (long j : cols[i])
        rows[i].push_back({j, problem.delassus_block(i, j)});
    }
  } else {
    const MatrixXd G = problem.dense_delassus();
    for (long i = 0; i < nc; ++i)
      for (long j = 0; j < nc; ++j) {
        const Matrix3d b = G.block<3, 3>(3 * i, 3 * j);
        if (i == j || b.cwiseAbs().maxCoeff() > 0.0)
          rows[i].push_back({j, b});
      }
  }
  for (long i = 0; i < nc; ++i)
    for (auto &e : rows[i])
      if (e.col == i)
        e.block.diagonal() += problem.R_diag().segment<3>(3 * i);
  return rows;
}

Vector3d block_velocity(const std::vector<BlockEntry> &row,
                        const VectorXd &lambda, const VectorXd &g, long i) {
  Vector3d sigma = g.segment<3>(3 * i);
  for (const auto &e : row)
    sigma.noalias() += e.block * lambda.segment<3>(3 * e.col);
  return sigma;
}

} // namespace

SolverSettings pgs_default_settings() {
  SolverSettings s;
  s.max_iter = 20000;
  return s;
}

SolverResult solve_pgs(const ContactProblem &problem,
                       const SolverSettings &settings, double omega,
                       const std::optional<VectorXd> &warm) {
  if (!(omega > 0.0 && omega < 2.0))
    throw std::invalid_argument("solve_pgs: omega must lie in (0, 2)");
  settings.validate();
  const long nc = problem.num_contacts();
  const long n = problem.dim();
  const VectorXd &mu = problem.mu();
  const VectorXd &g = problem.g();

  SolverResult result;
  result.lambda = VectorXd::Zero(n);
  result.sigma = g;
  result.desaxce_shift = VectorXd::Zero(n);
  result.rho = omega;
  if (nc == 0)
    return result;

  VectorXd lambda = VectorXd::Zero(n);
  if (settings.warm_start_policy == WarmStartPolicy::Provided) {
    const std::optional<VectorXd> &seed = warm ? warm : problem.warm_start();
    if (seed) {
      if (seed->size() != n)
        throw std::invalid_argument("solve_pgs: warm start dimension mismatch");
      lambda = *seed;
    }
  }

  const auto rows = block_rows(problem);
  // One scalar step per contact (largest diagonal entry of its block). A
  // per-axis scaling followed by the Euclidean projection has fixed points
  // that are not NCP solutions once the tangential and normal entries differ.
  std::vector<double> step_size(nc);
  for (long i = 0; i < nc; ++i) {
    double d = 0.0;
    for (const auto &e : rows[i])
      if (e.col == i)
        d = e.block.diagonal().maxCoeff();
    if (d < 1e-12)
      d += settings.eta;
    step_size[i] = 1.0 / d;
  }

  VectorXd sigma(n), sig_r(nc), prim(nc), dual(nc), comp(nc);
  result.status = Status::MaxIter;
  for (int k = 1; k <= settings.max_iter; ++k) {
    for (long i = 0; i < nc; ++i) {
      Vector3d s = block_velocity(rows[i], lambda, g, i);
      if (settings.desaxce)
        s[2] += mu[i] * s.head<2>().norm();
      const Vector3d step =
          lambda.segment<3>(3 * i) - omega * step_size[i] * s;
      lambda.segment<3>(3 * i) = project_soc(step, mu[i]);
    }
    result.iterations = k;

    for (long i = 0; i < nc; ++i)
      sigma.segment<3>(3 * i) = block_velocity(rows[i], lambda, g, i);
    if (!lambda.allFinite() || !sigma.allFinite()) {
      result.status = Status::NumericalFailure;
      result.failure_iteration = k;
      break;
    }
    kernels::ncp_violations(lambda, sigma, mu, settings.desaxce, sig_r, prim,
                            dual, comp);
    result.r_prim = prim.maxCoeff();
    result.r_dual = dual.maxCoeff();
    result.r_comp = settings.desaxce ? std::max(sig_r.maxCoeff(), comp.maxCoeff())
                                     : comp.maxCoeff();
    if (settings.record_trace)
      result.trace.push_back(
          {k, result.r_prim, result.r_dual, result.r_comp, omega});
    if (std::max({result.r_prim, result.r_dual, result.r_comp}) <=
            settings.eps_abs &&
        check_ncp(problem, lambda, settings.desaxce).max_violation <=
            settings.eps_abs) {
      result.status = Status::Converged;
      break;
    }
  }

  result.lambda = lambda;
  result.sigma = problem.velocity(lambda);
  return result;
}

} // namespace contact
