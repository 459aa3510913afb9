#pragma once

#include <Eigen/Core>

namespace contact {

using Eigen::Vector3d;
using Eigen::VectorXd;

/// Second-order friction cone {x : ||x_T|| <= mu * x_N}, with x laid out as
/// (T1, T2, N).
struct FrictionCone {
  double mu;

  bool contains(const Vector3d &x, double tol = 1e-10) const;
  /// Dual cone membership, i.e. x in K_{1/mu}.
  bool dual_contains(const Vector3d &x, double tol = 1e-10) const;
};

/// Euclidean projection onto K_mu (closed form, three cases).
Vector3d project_soc(const Vector3d &x, double mu);

/// Projection onto K_mu under the metric ||.||_D with D = diag(d_T, d_T, d_N).
/// Throws std::invalid_argument when the tangential entries differ.
Vector3d project_soc_diag_metric(const Vector3d &x, const Vector3d &d,
                                 double mu);

/// Blockwise projection onto the product of cones.
VectorXd project_cone_product(const VectorXd &x, const VectorXd &mu);

/// De Saxce correction, per block (0, 0, mu * ||sigma_T||).
VectorXd desaxce(const VectorXd &sigma, const VectorXd &mu);

inline Vector3d desaxce(const Vector3d &sigma, double mu) {
  return {0.0, 0.0, mu * sigma.head<2>().norm()};
}

bool dual_cone_contains(const Vector3d &x, double mu, double tol = 1e-10);

} // namespace contact
