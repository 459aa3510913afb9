#pragma once

#include <memory>
#include <optional>
#include <variant>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "contact/problem.hpp"
#include "contact/solver.hpp"

namespace contact {

/// Cholesky factorization of G + R + shift * Id. Keeps G + R so that a new
/// shift only costs a numeric refactorization.
class ShiftedFactorization {
public:
  ShiftedFactorization(const ContactProblem &problem, double shift);

  /// Refactorizes with a new diagonal shift; returns false on breakdown.
  bool refactor(double shift);
  bool ok() const { return ok_; }
  double shift() const { return shift_; }
  VectorXd solve(const VectorXd &rhs) const;

private:
  struct Dense {
    MatrixXd base;
    Eigen::LLT<MatrixXd> llt;
  };
  struct Sparse {
    SparseMatrix base;
    SparseMatrix shifted;
    Eigen::SimplicialLLT<SparseMatrix> llt;
  };
  // SimplicialLLT is not movable.
  std::variant<Dense, std::unique_ptr<Sparse>> impl_;
  double shift_ = 0.0;
  bool ok_ = false;
};

/// Factorization of G + R + (eta + rho) Id.
ShiftedFactorization factorize_shifted(const ContactProblem &problem,
                                       double eta, double rho);

struct Residuals {
  VectorXd r_prim; ///< f - y
  VectorXd r_dual; ///< eta (f - f_prev) + rho (y - y_prev)
  VectorXd r_comp; ///< per contact |f_i . z_i|
  double prim_norm() const { return r_prim.lpNorm<Eigen::Infinity>(); }
  double dual_norm() const { return r_dual.lpNorm<Eigen::Infinity>(); }
  double comp_norm() const {
    return r_comp.size() ? r_comp.maxCoeff() : 0.0;
  }
};

Residuals residuals(const VectorXd &f, const VectorXd &y, const VectorXd &z,
                    const VectorXd &prev_f, const VectorXd &prev_y, double rho,
                    double eta);

struct RhoUpdate {
  double rho;
  bool changed;
};

RhoUpdate update_rho_linear(double r_prim_norm, double r_dual_norm, double rho,
                            double tau_inc, double tau_dec, double alpha);

struct SpectralUpdate {
  double rho;
  double p;
  bool changed;
};

/// Exponent p is kept in [-kSpectralExponentBound, kSpectralExponentBound].
inline constexpr double kSpectralExponentBound = 2.0;

SpectralUpdate update_rho_spectral(double r_prim_norm, double r_dual_norm,
                                   double p, double m, double L, double p_inc,
                                   double p_dec, double alpha);

/// Proximal ADMM on the contact NCP with the De Saxce correction updated at
/// every iteration. `warm` is used only with WarmStartPolicy::Provided (falls
/// back to the problem's own warm start, then to zero).
SolverResult solve_admm(const ContactProblem &problem,
                        const SolverSettings &settings,
                        const std::optional<VectorXd> &warm = std::nullopt);

} // namespace contact
