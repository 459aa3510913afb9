#include "contact/cones.hpp"

#include <cmath>
#include <stdexcept>

#include "contact/kernels.hpp"

namespace contact {

bool FrictionCone::contains(const Vector3d &x, double tol) const {
  return x.head<2>().norm() <= mu * x[2] + tol;
}

bool FrictionCone::dual_contains(const Vector3d &x, double tol) const {
  return dual_cone_contains(x, mu, tol);
}

Vector3d project_soc(const Vector3d &x, double mu) {
  const double xt = x.head<2>().norm();
  const double xn = x[2];
  if (xt <= mu * xn)
    return x;
  // polar cone; also catches xt == 0 with xn < 0
  if (mu * xt <= -xn)
    return Vector3d::Zero();
  const double lam_n = (mu * xt + xn) / (mu * mu + 1.0);
  const double scale = mu * lam_n / xt;
  return {scale * x[0], scale * x[1], lam_n};
}

Vector3d project_soc_diag_metric(const Vector3d &x, const Vector3d &d,
                                 double mu) {
  if (d[0] != d[1])
    throw std::invalid_argument(
        "project_soc_diag_metric: tangential metric entries must be equal");
  if (!(d[0] > 0.0) || !(d[2] > 0.0))
    throw std::invalid_argument(
        "project_soc_diag_metric: metric entries must be positive");
  if (d[0] == d[2])
    return project_soc(x, mu);
  const Vector3d sqrt_d = d.cwiseSqrt();
  const double mu_scaled = std::sqrt(d[0] / d[2]) * mu;
  const Vector3d p = project_soc(sqrt_d.cwiseProduct(x), mu_scaled);
  return p.cwiseQuotient(sqrt_d);
}

VectorXd project_cone_product(const VectorXd &x, const VectorXd &mu) {
  VectorXd out(x.size());
  kernels::project_cone_product(x, mu, out);
  return out;
}

VectorXd desaxce(const VectorXd &sigma, const VectorXd &mu) {
  VectorXd out(sigma.size());
  kernels::desaxce(sigma, mu, out);
  return out;
}

bool dual_cone_contains(const Vector3d &x, double mu, double tol) {
  return x.head<2>().norm() <= x[2] / mu + tol;
}

} // namespace contact
