#pragma once

#include <Eigen/Core>

// Blockwise contact kernels. Each kernel in `contact::kernels` is
// OpenMP-parallel over contacts (above kParallelMinContacts) and has a serial
// counterpart in `contact::kernels::serial` kept as the reference for tests and
// benchmarks. All kernels are elementwise maps or max-reductions, so results
// are bitwise identical regardless of thread count.

namespace contact::kernels {

using Eigen::VectorXd;

inline constexpr long kParallelMinContacts = 256;

void project_cone_product(const VectorXd &x, const VectorXd &mu,
                          VectorXd &out);
void desaxce(const VectorXd &sigma, const VectorXd &mu, VectorXd &out);
/// max_i |a_i . b_i| over 3-blocks.
double max_block_dot(const VectorXd &a, const VectorXd &b);
/// Per-contact NCP violations: (signorini, primal cone, dual cone, ncp comp).
/// sigma must already hold (G+R) lambda + g. Pass desaxce_on=false for the
/// cone-complementarity variant.
void ncp_violations(const VectorXd &lambda, const VectorXd &sigma,
                    const VectorXd &mu, bool desaxce_on,
                    Eigen::Ref<VectorXd> signorini, Eigen::Ref<VectorXd> primal,
                    Eigen::Ref<VectorXd> dual, Eigen::Ref<VectorXd> comp);

namespace serial {
void project_cone_product(const VectorXd &x, const VectorXd &mu,
                          VectorXd &out);
void desaxce(const VectorXd &sigma, const VectorXd &mu, VectorXd &out);
double max_block_dot(const VectorXd &a, const VectorXd &b);
void ncp_violations(const VectorXd &lambda, const VectorXd &sigma,
                    const VectorXd &mu, bool desaxce_on,
                    Eigen::Ref<VectorXd> signorini, Eigen::Ref<VectorXd> primal,
                    Eigen::Ref<VectorXd> dual, Eigen::Ref<VectorXd> comp);
} // namespace serial

} // namespace contact::kernels
