#include "contact/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "contact/cones.hpp"

namespace contact::kernels {

using Eigen::Vector3d;

namespace {

inline void violations_block(const Vector3d &lam, const Vector3d &sig,
                             double mu, bool desaxce_on, double &signorini,
                             double &primal, double &dual, double &comp) {
  Vector3d shifted = sig;
  if (desaxce_on)
    shifted[2] += mu * sig.head<2>().norm();
  signorini = std::abs(lam[2] * sig[2]);
  primal = (lam - project_soc(lam, mu)).norm();
  dual = (shifted - project_soc(shifted, 1.0 / mu)).norm();
  comp = std::abs(lam.dot(shifted));
}

} // namespace

void project_cone_product(const VectorXd &x, const VectorXd &mu,
                          VectorXd &out) {
  const long nc = mu.size();
  if (nc < kParallelMinContacts)
    return serial::project_cone_product(x, mu, out);
  out.resize(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nc; ++i)
    out.segment<3>(3 * i) = project_soc(x.segment<3>(3 * i), mu[i]);
}

void desaxce(const VectorXd &sigma, const VectorXd &mu, VectorXd &out) {
  const long nc = mu.size();
  if (nc < kParallelMinContacts)
    return serial::desaxce(sigma, mu, out);
  out.resize(sigma.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nc; ++i) {
    out[3 * i] = 0.0;
    out[3 * i + 1] = 0.0;
    out[3 * i + 2] = mu[i] * sigma.segment<2>(3 * i).norm();
  }
}

double max_block_dot(const VectorXd &a, const VectorXd &b) {
  const long nc = a.size() / 3;
  if (nc < kParallelMinContacts)
    return serial::max_block_dot(a, b);
  double m = 0.0;
#pragma omp parallel for reduction(max : m)
  for (long i = 0; i < nc; ++i)
    m = std::max(m, std::abs(a.segment<3>(3 * i).dot(b.segment<3>(3 * i))));
  return m;
}

void ncp_violations(const VectorXd &lambda, const VectorXd &sigma,
                    const VectorXd &mu, bool desaxce_on,
                    Eigen::Ref<VectorXd> signorini, Eigen::Ref<VectorXd> primal,
                    Eigen::Ref<VectorXd> dual, Eigen::Ref<VectorXd> comp) {
  const long nc = mu.size();
  if (nc < kParallelMinContacts)
    return serial::ncp_violations(lambda, sigma, mu, desaxce_on, signorini,
                                  primal, dual, comp);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nc; ++i)
    violations_block(lambda.segment<3>(3 * i), sigma.segment<3>(3 * i), mu[i],
                     desaxce_on, signorini[i], primal[i], dual[i], comp[i]);
}

namespace serial {

void project_cone_product(const VectorXd &x, const VectorXd &mu,
                          VectorXd &out) {
  out.resize(x.size());
  for (long i = 0; i < mu.size(); ++i)
    out.segment<3>(3 * i) = project_soc(x.segment<3>(3 * i), mu[i]);
}

void desaxce(const VectorXd &sigma, const VectorXd &mu, VectorXd &out) {
  out.resize(sigma.size());
  for (long i = 0; i < mu.size(); ++i)
    out.segment<3>(3 * i) = contact::desaxce(Vector3d(sigma.segment<3>(3 * i)),
                                             mu[i]);
}

double max_block_dot(const VectorXd &a, const VectorXd &b) {
  double m = 0.0;
  for (long i = 0; i < a.size() / 3; ++i)
    m = std::max(m, std::abs(a.segment<3>(3 * i).dot(b.segment<3>(3 * i))));
  return m;
}

void ncp_violations(const VectorXd &lambda, const VectorXd &sigma,
                    const VectorXd &mu, bool desaxce_on,
                    Eigen::Ref<VectorXd> signorini, Eigen::Ref<VectorXd> primal,
                    Eigen::Ref<VectorXd> dual, Eigen::Ref<VectorXd> comp) {
  for (long i = 0; i < mu.size(); ++i)
    violations_block(lambda.segment<3>(3 * i), sigma.segment<3>(3 * i), mu[i],
                     desaxce_on, signorini[i], primal[i], dual[i], comp[i]);
}

} // namespace serial

} // namespace contact::kernels
