#pragma once

#include <string>

#include <Eigen/Core>

#include "contact/problem.hpp"

namespace contact {

/// Contact inverse dynamics: find lambda with
///   K_mu ∋ lambda ⊥ sigma + Gamma(sigma) ∈ K_mu^*,
///   sigma = R lambda + J v_ref + gamma.
struct IdProblem {
  VectorXd v_ref;
  MatrixXd J;
  VectorXd gamma;
  VectorXd R_diag;
  VectorXd mu;
  /// Proximal weight; must be > 0, which is what makes R = 0 tractable.
  double rho = 1e-8;

  long num_contacts() const { return mu.size(); }
  void validate() const;
  /// R lambda + J v_ref + gamma
  VectorXd velocity(const VectorXd &lambda) const;
};

enum class IdStatus { Converged, MaxIter, Diverged };

std::string to_string(IdStatus status);

struct IdResult {
  VectorXd lambda;
  IdStatus status = IdStatus::Converged;
  int iterations = 0;
};

/// Iterates lambda <- P^{R + rho Id}_{K_mu}(-(R + rho Id)^{-1}
/// (J v_ref + gamma + s - rho lambda)) with s = Gamma(sigma(lambda)), starting
/// from zero. Converged when ||lambda_k - lambda_{k-1}||_inf <= eps_abs;
/// Diverged when ||lambda||_inf exceeds kIdDivergenceBound. desaxce = false
/// gives the cone complementarity variant.
IdResult solve_id(const IdProblem &problem, int n_iter, double eps_abs,
                  bool desaxce = true);

inline constexpr double kIdDivergenceBound = 1e12;

/// One application of the proximal map above.
VectorXd id_proximal_step(const IdProblem &problem, const VectorXd &lambda,
                          bool desaxce = true);

/// check_ncp applied to the inverse problem (G = 0, g = J v_ref + gamma).
ResidualReport check_id_ncp(const IdProblem &problem, const VectorXd &lambda,
                            bool desaxce = true);

/// Constant torque over a step of length dt that, together with the contact
/// impulses, takes the velocity from v to v_ref:
///   tau = M (v_ref - v) / dt + b - J^T lambda / dt.
VectorXd recover_torque(const MatrixXd &M, const VectorXd &b, const VectorXd &v,
                        const VectorXd &v_ref, double dt, const MatrixXd &J,
                        const VectorXd &lambda);

} // namespace contact
