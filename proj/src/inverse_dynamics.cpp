#include "contact/inverse_dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "contact/cones.hpp"

namespace contact {

using Eigen::Vector3d;

std::string to_string(IdStatus status) {
  switch (status) {
  case IdStatus::Converged:
    return "Converged";
  case IdStatus::MaxIter:
    return "MaxIter";
  case IdStatus::Diverged:
    return "Diverged";
  }
  return "Unknown";
}

void IdProblem::validate() const {
  auto require = [](bool cond, const std::string &msg) {
    if (!cond)
      throw std::invalid_argument("IdProblem: " + msg);
  };
  const long n = 3 * mu.size();
  require(J.rows() == n, "J must have 3 rows per contact");
  require(J.cols() == v_ref.size(), "J columns must match v_ref");
  require(gamma.size() == n, "gamma must have 3 entries per contact");
  require(R_diag.size() == n, "R_diag must have 3 entries per contact");
  require(rho > 0.0, "rho must be > 0");
  require((R_diag.array() >= 0.0).all(), "R_diag must be nonnegative");
  for (long i = 0; i < mu.size(); ++i) {
    require(std::isfinite(mu[i]) && mu[i] > 0.0, "mu must be positive");
    require(R_diag[3 * i] == R_diag[3 * i + 1],
            "tangential compliance entries must be equal");
  }
}

VectorXd IdProblem::velocity(const VectorXd &lambda) const {
  return R_diag.cwiseProduct(lambda) + J * v_ref + gamma;
}

VectorXd id_proximal_step(const IdProblem &problem, const VectorXd &lambda,
                          bool desaxce_on) {
  const long nc = problem.num_contacts();
  const VectorXd free_velocity = problem.J * problem.v_ref + problem.gamma;
  VectorXd next(3 * nc);
  for (long i = 0; i < nc; ++i) {
    const Vector3d lam = lambda.segment<3>(3 * i);
    const Vector3d r = problem.R_diag.segment<3>(3 * i);
    const Vector3d c = free_velocity.segment<3>(3 * i);
    Vector3d s = Vector3d::Zero();
    if (desaxce_on)
      s = desaxce(Vector3d(r.cwiseProduct(lam) + c), problem.mu[i]);
    const Vector3d metric = r.array() + problem.rho;
    const Vector3d target =
        -(c + s - problem.rho * lam).cwiseQuotient(metric);
    next.segment<3>(3 * i) =
        project_soc_diag_metric(target, metric, problem.mu[i]);
  }
  return next;
}

IdResult solve_id(const IdProblem &problem, int n_iter, double eps_abs,
                  bool desaxce_on) {
  problem.validate();
  IdResult result;
  result.lambda = VectorXd::Zero(3 * problem.num_contacts());
  result.status = IdStatus::MaxIter;
  if (problem.num_contacts() == 0) {
    result.status = IdStatus::Converged;
    return result;
  }
  for (int k = 1; k <= n_iter; ++k) {
    VectorXd next = id_proximal_step(problem, result.lambda, desaxce_on);
    const double step = (next - result.lambda).lpNorm<Eigen::Infinity>();
    result.lambda = std::move(next);
    result.iterations = k;
    if (!result.lambda.allFinite() ||
        result.lambda.lpNorm<Eigen::Infinity>() > kIdDivergenceBound) {
      result.status = IdStatus::Diverged;
      break;
    }
    if (step <= eps_abs) {
      result.status = IdStatus::Converged;
      break;
    }
  }
  return result;
}

ResidualReport check_id_ncp(const IdProblem &problem, const VectorXd &lambda,
                            bool desaxce_on) {
  problem.validate();
  const long n = 3 * problem.num_contacts();
  const ContactProblem as_ncp(MatrixXd::Zero(n, n),
                              problem.J * problem.v_ref + problem.gamma,
                              problem.mu, problem.R_diag);
  return check_ncp(as_ncp, lambda, desaxce_on);
}

VectorXd recover_torque(const MatrixXd &M, const VectorXd &b, const VectorXd &v,
                        const VectorXd &v_ref, double dt, const MatrixXd &J,
                        const VectorXd &lambda) {
  if (!(dt > 0.0))
    throw std::invalid_argument("recover_torque: dt must be > 0");
  return M * (v_ref - v) / dt + b - J.transpose() * lambda / dt;
}

} // namespace contact
