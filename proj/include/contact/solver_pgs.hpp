#pragma once

#include <optional>

#include "contact/problem.hpp"
#include "contact/solver.hpp"

namespace contact {

/// Settings suited to the PGS baseline (20000 sweeps).
SolverSettings pgs_default_settings();

/// Over-relaxed projected Gauss-Seidel on the NCP. Contacts are swept in index
/// order; each block takes a step of omega / max(diag(G_ii + R_ii)) along
/// sigma_i + Gamma(sigma_i) followed by a projection onto its cone. Stops when
/// the NCP residual (as measured by check_ncp) is below eps_abs. omega must be
/// in (0, 2). cholesky_updates is always zero.
SolverResult solve_pgs(const ContactProblem &problem,
                       const SolverSettings &settings, double omega = 1.0,
                       const std::optional<VectorXd> &warm = std::nullopt);

} // namespace contact
