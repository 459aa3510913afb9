#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace contact {

using Eigen::VectorXd;

enum class Status { Converged, MaxIter, NumericalFailure };

std::string to_string(Status status);

/// rho <- tau_inc * rho or rho / tau_dec when the residual ratio leaves the
/// alpha-tube.
struct LinearRule {
  double tau_inc = 2.0;
  double tau_dec = 2.0;
};

/// rho = sqrt(m L) * kappa^p, with the exponent p moved by p_inc / p_dec when
/// the residual ratio leaves the alpha-tube.
struct SpectralRule {
  double p_inc = 0.05;
  double p_dec = 0.05;
  double p_init = 0.0;
};

using RhoStrategy = std::variant<LinearRule, SpectralRule>;

enum class WarmStartPolicy { Zero, Provided };

struct SolverSettings {
  double eps_abs = 1e-6;
  int max_iter = 1000;
  double eta = 1e-6;
  /// Defaults to sqrt(mL) kappa^{p_init} for the spectral rule, 1 otherwise.
  std::optional<double> rho_init;
  RhoStrategy strategy = SpectralRule{};
  double alpha = 10.0;
  WarmStartPolicy warm_start_policy = WarmStartPolicy::Zero;
  /// false drops the De Saxce correction: the solver then targets the cone
  /// complementarity relaxation.
  bool desaxce = true;
  bool record_trace = false;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct TraceRow {
  int iter;
  double r_prim;
  double r_dual;
  double r_comp;
  double rho;
};

struct SolverResult {
  VectorXd lambda;
  VectorXd sigma;
  Status status = Status::Converged;
  int iterations = 0;
  int cholesky_updates = 0;
  /// Iteration at which a non-finite iterate appeared, -1 otherwise.
  int failure_iteration = -1;
  double r_prim = 0.0;
  double r_dual = 0.0;
  double r_comp = 0.0;
  double rho = 0.0;
  /// Last De Saxce estimate s used by the ADMM f-update.
  VectorXd desaxce_shift;
  std::vector<TraceRow> trace;
};

/// CSV with header `iter,r_prim,r_dual,r_comp,rho`.
void write_trace_csv(std::ostream &out, const std::vector<TraceRow> &trace);

} // namespace contact
