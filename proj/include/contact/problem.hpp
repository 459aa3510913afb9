#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace contact {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Thrown when a matrix expected to be positive definite is not.
class FactorizationError : public std::runtime_error {
public:
  FactorizationError(const std::string &what, long pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  long pivot() const { return pivot_; }

private:
  long pivot_;
};

/// One instance of the frictional contact NCP
///
///   K_mu  ∋  lambda  ⊥  sigma + Gamma(sigma)  ∈  K_mu^*,
///   sigma = (G + R) lambda + g.
///
/// Each contact owns a 3-block ordered [T1, T2, N]; contacts are concatenated.
/// G is symmetrized on construction and stored dense up to
/// kDenseMaxContacts contacts, column-compressed above. Immutable once built.
class ContactProblem {
public:
  static constexpr long kDenseMaxContacts = 64;

  ContactProblem() = default;
  ContactProblem(MatrixXd G, VectorXd g, VectorXd mu, VectorXd R_diag = {});
  ContactProblem(const SparseMatrix &G, VectorXd g, VectorXd mu,
                 VectorXd R_diag = {});

  long num_contacts() const { return mu_.size(); }
  long dim() const { return g_.size(); }
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(G_); }

  const VectorXd &g() const { return g_; }
  const VectorXd &mu() const { return mu_; }
  const VectorXd &R_diag() const { return R_; }
  const std::optional<VectorXd> &warm_start() const { return warm_start_; }
  void set_warm_start(VectorXd lambda);

  /// G x
  VectorXd delassus_times(const VectorXd &x) const;
  /// (G + R) x
  VectorXd apply(const VectorXd &x) const;
  /// (G + R) lambda + g
  VectorXd velocity(const VectorXd &lambda) const;

  MatrixXd dense_delassus() const;
  SparseMatrix sparse_delassus() const;
  VectorXd delassus_diagonal() const;
  /// 3x3 block (i, j) of G.
  Matrix3d delassus_block(long i, long j) const;

  /// Same G, mu, R with a different free velocity.
  ContactProblem with_free_velocity(VectorXd g) const;

private:
  void validate_and_symmetrize();

  std::variant<MatrixXd, SparseMatrix> G_{MatrixXd(0, 0)};
  VectorXd g_;
  VectorXd mu_;
  VectorXd R_;
  std::optional<VectorXd> warm_start_;
};

/// Per-contact violations of the NCP for a candidate lambda.
struct ResidualReport {
  VectorXd signorini_comp;
  VectorXd primal_cone_violation;
  VectorXd dual_cone_violation;
  VectorXd ncp_comp;
  double max_violation = 0.0;
};

/// G = J M^{-1} J^T via a Cholesky factor of M and one triangular solve.
/// Throws FactorizationError naming the first non-positive pivot when M is not
/// positive definite.
MatrixXd assemble_delassus(const MatrixXd &M, const MatrixXd &J);

/// The NCP oracle; independent of every solver. With desaxce_on = false the
/// dual condition is checked against sigma alone (cone complementarity) and
/// the Signorini term is left out of max_violation.
ResidualReport check_ncp(const ContactProblem &problem, const VectorXd &lambda,
                         bool desaxce_on = true);

struct SpectrumEstimate {
  double m = 0.0; ///< smallest eigenvalue (estimate)
  double L = 0.0; ///< largest eigenvalue (estimate)
  bool converged = true;
  double condition() const { return L / m; }
};

/// Extreme eigenvalues of G + R from the Krylov space of the power sequence
/// (Lanczos, at most max_iter matrix-vector products). Both are clamped at
/// zero from below.
SpectrumEstimate estimate_spectrum(const ContactProblem &problem,
                                   int max_iter = 500, double tol = 1e-10);

/// Extreme eigenvalues of G + R + (eta + rho) Id. The shift is exact, so
/// m >= eta always holds.
SpectrumEstimate condition_estimate(const ContactProblem &problem, double eta,
                                    double rho);

} // namespace contact
