#include <doctest.h>

#include <random>

#include "contact/problem.hpp"
#include "contact/problem_io.hpp"
#include "oracles.hpp"

using namespace contact;
using Eigen::Vector3d;

namespace {

ContactProblem single(const Vector3d &g, double mu, const Matrix3d &G =
                                                         Matrix3d::Identity()) {
  VectorXd m(1);
  m << mu;
  return ContactProblem(MatrixXd(G), VectorXd(g), m);
}

MatrixXd random_spd(std::mt19937 &rng, long n, const VectorXd &eigenvalues) {
  std::normal_distribution<double> nd;
  MatrixXd A(n, n);
  for (long i = 0; i < n * n; ++i)
    A(i % n, i / n) = nd(rng);
  const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(A).householderQ();
  return Q * eigenvalues.asDiagonal() * Q.transpose();
}

} // namespace

TEST_CASE("assemble_delassus") {
  SUBCASE("identity") {
    CHECK(assemble_delassus(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3))
              .isApprox(MatrixXd::Identity(3, 3)));
  }
  SUBCASE("point mass of 2 kg") {
    CHECK(assemble_delassus(2.0 * MatrixXd::Identity(3, 3),
                            MatrixXd::Identity(3, 3))
              .isApprox(0.5 * MatrixXd::Identity(3, 3)));
  }
  SUBCASE("two stacked unit masses, normal rows only") {
    // Full 3-row blocks along z; check the normal-normal entries.
    MatrixXd J = MatrixXd::Zero(6, 2);
    J(2, 0) = 1.0;
    J(5, 0) = -1.0;
    J(5, 1) = 1.0;
    const MatrixXd M = MatrixXd::Identity(2, 2);
    const MatrixXd G = assemble_delassus(M, J);
    const MatrixXd ref = oracle::brute_force_delassus(M, J);
    CHECK((G - ref).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(G(2, 2) == doctest::Approx(1.0));
    CHECK(G(2, 5) == doctest::Approx(-1.0));
    CHECK(G(5, 5) == doctest::Approx(2.0));
  }
  SUBCASE("random systems agree with the explicit triple product and are PSD") {
    std::mt19937 rng(17);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
      const long nv = 2 + trial % 5;
      const long nc = 1 + trial % 3;
      VectorXd ev = VectorXd::LinSpaced(nv, 0.5, 20.0);
      const MatrixXd M = random_spd(rng, nv, ev);
      MatrixXd J(3 * nc, nv);
      for (long i = 0; i < J.size(); ++i)
        J(i % J.rows(), i / J.rows()) = nd(rng);
      const MatrixXd G = assemble_delassus(M, J);
      CHECK((G - oracle::brute_force_delassus(M, J)).cwiseAbs().maxCoeff() <=
            1e-10 * (1 + G.cwiseAbs().maxCoeff()));
      CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (int k = 0; k < 100; ++k) {
        VectorXd v(3 * nc);
        for (long i = 0; i < v.size(); ++i)
          v[i] = nd(rng);
        v.normalize();
        CHECK(v.dot(G * v) >= -1e-10);
      }
    }
  }
  SUBCASE("indefinite mass matrix names the pivot") {
    MatrixXd M = MatrixXd::Identity(3, 3);
    M(1, 1) = -1.0;
    try {
      assemble_delassus(M, MatrixXd::Identity(3, 3));
      FAIL("expected FactorizationError");
    } catch (const FactorizationError &e) {
      CHECK(e.pivot() == 1);
      CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }
  }
}

TEST_CASE("ContactProblem validation") {
  VectorXd mu(1);
  mu << 0.5;
  CHECK_THROWS_AS(ContactProblem(MatrixXd::Identity(3, 3), VectorXd::Zero(4), mu),
                  std::invalid_argument);
  VectorXd bad_mu(1);
  bad_mu << 0.0;
  CHECK_THROWS_AS(
      ContactProblem(MatrixXd::Identity(3, 3), VectorXd::Zero(3), bad_mu),
      std::invalid_argument);
  MatrixXd asym = MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(ContactProblem(asym, VectorXd::Zero(3), mu),
                  std::invalid_argument);
  VectorXd R(3);
  R << 1, 2, 0;
  CHECK_THROWS_AS(ContactProblem(MatrixXd::Identity(3, 3), VectorXd::Zero(3),
                                 mu, R),
                  std::invalid_argument);

  // round-off asymmetry is averaged away
  MatrixXd near = MatrixXd::Identity(3, 3);
  near(0, 1) = 1e-14;
  const ContactProblem p(near, VectorXd::Zero(3), mu);
  CHECK(p.dense_delassus()(0, 1) == p.dense_delassus()(1, 0));

  // storage switches to sparse above 64 contacts
  const long nc = ContactProblem::kDenseMaxContacts + 1;
  const ContactProblem big(MatrixXd::Identity(3 * nc, 3 * nc),
                           VectorXd::Zero(3 * nc), VectorXd::Constant(nc, 0.5));
  CHECK(big.is_sparse());
  CHECK_FALSE(p.is_sparse());
}

TEST_CASE("check_ncp examples") {
  SUBCASE("take-off") {
    const auto r = check_ncp(single({0, 0, 1}, 0.5), VectorXd::Zero(3));
    CHECK(r.max_violation == 0.0);
  }
  SUBCASE("sticking normal impulse") {
    const ContactProblem p = single({0, 0, -1}, 0.5);
    VectorXd lam(3);
    lam << 0, 0, 1;
    CHECK(p.velocity(lam).isZero(0.0));
    CHECK(check_ncp(p, lam).max_violation == 0.0);
  }
  SUBCASE("overshooting impulse") {
    VectorXd lam(3);
    lam << 0, 0, 2;
    const auto r = check_ncp(single({0, 0, -1}, 0.5), lam);
    CHECK(r.signorini_comp[0] == doctest::Approx(2.0));
    CHECK(r.primal_cone_violation[0] == 0.0);
    CHECK(r.max_violation == doctest::Approx(2.0));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(check_ncp(single({0, 0, 1}, 0.5), VectorXd::Zero(2)),
                    std::invalid_argument);
  }
  SUBCASE("cone complementarity variant drops Gamma") {
    // sliding solution of the NCP is not a CCP solution
    VectorXd lam(3);
    lam << 0.5, 0, 1;
    const ContactProblem p = single({-1, 0, -1}, 0.5);
    CHECK(check_ncp(p, lam).max_violation <= 1e-15);
    CHECK(check_ncp(p, lam, false).max_violation > 0.1);
  }
}

TEST_CASE("check_ncp scaling") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix3d G = oracle::random_spd3(rng, 0.5, 2.0);
    const Vector3d g(u(rng), u(rng), u(rng));
    const Vector3d lam(u(rng), u(rng), std::abs(u(rng)));
    const double s = 0.5 + 2.0 * std::abs(u(rng));
    const auto r1 = check_ncp(single(g, 0.6, G), VectorXd(lam));
    const auto r2 = check_ncp(single(s * g, 0.6, G), VectorXd(s * lam));
    CHECK(r2.signorini_comp[0] ==
          doctest::Approx(s * s * r1.signorini_comp[0]).epsilon(1e-12));
    CHECK(r2.ncp_comp[0] == doctest::Approx(s * s * r1.ncp_comp[0]).epsilon(1e-12));
    CHECK((r2.primal_cone_violation[0] > 0) == (r1.primal_cone_violation[0] > 0));
    CHECK(r2.primal_cone_violation[0] ==
          doctest::Approx(s * r1.primal_cone_violation[0]).epsilon(1e-12));
    CHECK(r2.dual_cone_violation[0] ==
          doctest::Approx(s * r1.dual_cone_violation[0]).epsilon(1e-12));
  }
}

TEST_CASE("condition_estimate") {
  SUBCASE("diagonal") {
    MatrixXd G = MatrixXd::Zero(3, 3);
    G(0, 0) = 1.0;
    G(1, 1) = 4.0;
    G(2, 2) = 4.0;
    VectorXd mu(1);
    mu << 0.5;
    const auto est =
        condition_estimate(ContactProblem(G, VectorXd::Zero(3), mu), 1e-6, 1.0);
    CHECK(est.m == doctest::Approx(2.000001).epsilon(1e-12));
    CHECK(est.L == doctest::Approx(5.000001).epsilon(1e-12));
    CHECK(est.converged);
  }
  SUBCASE("zero matrix") {
    VectorXd mu(1);
    mu << 0.5;
    const auto est = condition_estimate(
        ContactProblem(MatrixXd::Zero(3, 3), VectorXd::Zero(3), mu), 1e-6, 0.1);
    CHECK(est.m == doctest::Approx(0.100001).epsilon(1e-12));
    CHECK(est.L == doctest::Approx(0.100001).epsilon(1e-12));
  }
  SUBCASE("random SPD with a known spectrum") {
    std::mt19937 rng(9);
    VectorXd ev(6);
    ev << 1e-4, 1e-3, 1e-2, 1e-1, 1e1, 1e2;
    VectorXd mu(2);
    mu << 0.5, 0.5;
    const ContactProblem p(random_spd(rng, 6, ev), VectorXd::Zero(6), mu);
    const auto est = condition_estimate(p, 1e-6, 1.0);
    CHECK(std::abs(est.L - (1e2 + 1e-6 + 1.0)) <= 1e-3 * (1e2 + 1.0));
    CHECK(est.m >= 1e-6);
    CHECK(est.m == doctest::Approx(1e-4 + 1e-6 + 1.0).epsilon(1e-6));
  }
  SUBCASE("rank deficient") {
    // two rows of J identical -> singular G; the shift is exact
    MatrixXd J = MatrixXd::Zero(6, 3);
    J.topRows(3) = MatrixXd::Identity(3, 3);
    J.bottomRows(3) = MatrixXd::Identity(3, 3);
    VectorXd mu(2);
    mu << 0.5, 0.5;
    const ContactProblem p(assemble_delassus(MatrixXd::Identity(3, 3), J),
                           VectorXd::Zero(6), mu);
    const auto est = condition_estimate(p, 1e-6, 1e-3);
    CHECK(est.m == doctest::Approx(1e-6 + 1e-3).epsilon(1e-9));
    CHECK(est.L == doctest::Approx(2.0 + 1e-6 + 1e-3).epsilon(1e-9));
  }
  SUBCASE("invalid shifts") {
    VectorXd mu(1);
    mu << 0.5;
    const ContactProblem p(MatrixXd::Identity(3, 3), VectorXd::Zero(3), mu);
    CHECK_THROWS_AS(condition_estimate(p, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(condition_estimate(p, 1e-6, 0.0), std::invalid_argument);
  }
}

TEST_CASE("problem JSON") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  SUBCASE("write/read preserves every value for dense and sparse storage") {
    for (long nc : {1L, 3L, ContactProblem::kDenseMaxContacts + 2}) {
      MatrixXd A(3 * nc, 3 * nc);
      for (long i = 0; i < A.size(); ++i)
        A(i % A.rows(), i / A.rows()) = i % 7 == 0 ? u(rng) : 0.0;
      const MatrixXd G = A * A.transpose();
      VectorXd g(3 * nc), mu(nc), R(3 * nc);
      for (long i = 0; i < 3 * nc; ++i)
        g[i] = u(rng) / 3.0;
      for (long i = 0; i < nc; ++i) {
        mu[i] = 0.1 + std::abs(u(rng));
        R.segment<3>(3 * i) << 1e-3 * i, 1e-3 * i, 2e-3 * i;
      }
      ContactProblem p(G, g, mu, R);
      p.set_warm_start(VectorXd::Constant(3 * nc, 1.0 / 3.0));
      const ContactProblem q = problem_from_json(parse_json(problem_to_json(p)));
      CHECK(q.is_sparse() == p.is_sparse());
      CHECK(q.dense_delassus() == p.dense_delassus());
      CHECK(q.g() == p.g());
      CHECK(q.mu() == p.mu());
      CHECK(q.R_diag() == p.R_diag());
      REQUIRE(q.warm_start());
      CHECK(*q.warm_start() == *p.warm_start());
    }
  }
  SUBCASE("sparse triplets") {
    const auto p = problem_from_json(parse_json(R"({"n_c": 1,
      "G": {"sparse": [[0,0,1.0],[1,1,2.0],[2,2,3.0],[0,2,0.5],[2,0,0.5]]},
      "g": [0, 0, -1], "mu": [0.4], "R_diag": [0, 0, 0]})"));
    CHECK(p.dense_delassus()(0, 2) == 0.5);
    CHECK(p.dense_delassus()(1, 1) == 2.0);
  }
  SUBCASE("malformed text reports line and column") {
    try {
      parse_json("{\n  \"n_c\": 1,\n  \"g\": [1, 2,, 3]\n}");
      FAIL("expected ParseError");
    } catch (const ParseError &e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 14);
    }
  }
  SUBCASE("schema errors") {
    CHECK_THROWS_AS(problem_from_json(parse_json(R"({"n_c": 1, "g": [0,0,0],
      "mu": [0.5], "G": {"dense": [1, 0, 0]}})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(problem_from_json(parse_json(R"({"n_c": 1})")),
                    std::invalid_argument);
  }
  SUBCASE("17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
  }
}
