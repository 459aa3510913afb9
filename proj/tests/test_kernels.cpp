#include <doctest.h>

#include <random>

#include "contact/kernels.hpp"

using namespace contact;
using Eigen::VectorXd;

namespace {

struct Batch {
  VectorXd x, mu;
};

Batch random_batch(long nc, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-2, 2), um(0.1, 1.5);
  Batch b{VectorXd(3 * nc), VectorXd(nc)};
  for (long i = 0; i < 3 * nc; ++i)
    b.x[i] = u(rng);
  for (long i = 0; i < nc; ++i)
    b.mu[i] = um(rng);
  return b;
}

} // namespace

TEST_CASE("parallel kernels match the serial reference bitwise") {
  for (long nc : {0L, 1L, 7L, kernels::kParallelMinContacts + 13, 5000L}) {
    CAPTURE(nc);
    const Batch a = random_batch(nc, 1);
    const Batch b = random_batch(nc, 2);
    VectorXd p1, p2;
    kernels::project_cone_product(a.x, a.mu, p1);
    kernels::serial::project_cone_product(a.x, a.mu, p2);
    CHECK(p1 == p2);

    kernels::desaxce(a.x, a.mu, p1);
    kernels::serial::desaxce(a.x, a.mu, p2);
    CHECK(p1 == p2);

    CHECK(kernels::max_block_dot(a.x, b.x) ==
          kernels::serial::max_block_dot(a.x, b.x));

    for (bool ds : {true, false}) {
      VectorXd s1(nc), q1(nc), d1(nc), c1(nc), s2(nc), q2(nc), d2(nc), c2(nc);
      kernels::ncp_violations(a.x, b.x, a.mu, ds, s1, q1, d1, c1);
      kernels::serial::ncp_violations(a.x, b.x, a.mu, ds, s2, q2, d2, c2);
      CHECK(s1 == s2);
      CHECK(q1 == q2);
      CHECK(d1 == d2);
      CHECK(c1 == c2);
    }
  }
}
