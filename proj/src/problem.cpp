#include "contact/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "contact/kernels.hpp"

namespace contact {

namespace {

void require(bool cond, const std::string &msg) {
  if (!cond)
    throw std::invalid_argument("ContactProblem: " + msg);
}

} // namespace

ContactProblem::ContactProblem(MatrixXd G, VectorXd g, VectorXd mu,
                               VectorXd R_diag)
    : g_(std::move(g)), mu_(std::move(mu)), R_(std::move(R_diag)) {
  require(G.rows() == G.cols(), "G must be square");
  require(G.rows() == g_.size(), "G and g dimensions differ");
  if (mu_.size() > kDenseMaxContacts)
    G_ = SparseMatrix(G.sparseView());
  else
    G_ = std::move(G);
  validate_and_symmetrize();
}

ContactProblem::ContactProblem(const SparseMatrix &G, VectorXd g, VectorXd mu,
                               VectorXd R_diag)
    : g_(std::move(g)), mu_(std::move(mu)), R_(std::move(R_diag)) {
  require(G.rows() == G.cols(), "G must be square");
  require(G.rows() == g_.size(), "G and g dimensions differ");
  if (mu_.size() > kDenseMaxContacts)
    G_ = G;
  else
    G_ = MatrixXd(G);
  validate_and_symmetrize();
}

void ContactProblem::validate_and_symmetrize() {
  const long n = g_.size();
  require(n == 3 * mu_.size(), "g must have 3 entries per contact");
  if (R_.size() == 0)
    R_ = VectorXd::Zero(n);
  require(R_.size() == n, "R_diag must have 3 entries per contact");
  require(g_.allFinite(), "g must be finite");
  for (long i = 0; i < mu_.size(); ++i) {
    require(std::isfinite(mu_[i]) && mu_[i] > 0.0,
            "friction coefficient " + std::to_string(i) +
                " must be positive and finite");
    require(R_[3 * i] == R_[3 * i + 1],
            "tangential compliance entries of contact " + std::to_string(i) +
                " differ");
  }
  require((R_.array() >= 0.0).all() && R_.allFinite(),
          "compliance entries must be nonnegative");

  auto check = [&](double asym, double scale, const VectorXd &diag) {
    require(asym <= 1e-10 * scale, "G is not symmetric");
    require((diag.array() >= -1e-14 * scale).all(),
            "G has a negative diagonal entry");
  };
  if (auto *dense = std::get_if<MatrixXd>(&G_)) {
    require(dense->allFinite(), "G must be finite");
    const double scale = n ? dense->cwiseAbs().maxCoeff() : 0.0;
    const double asym =
        n ? (*dense - dense->transpose()).cwiseAbs().maxCoeff() : 0.0;
    check(asym, scale, dense->diagonal());
    *dense = 0.5 * (*dense + dense->transpose()).eval();
  } else {
    auto &sparse = std::get<SparseMatrix>(G_);
    const SparseMatrix t = sparse.transpose();
    const SparseMatrix diff = sparse - t;
    double scale = 0.0, asym = 0.0;
    for (int k = 0; k < sparse.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(sparse, k); it; ++it) {
        require(std::isfinite(it.value()), "G must be finite");
        scale = std::max(scale, std::abs(it.value()));
      }
    for (int k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
        asym = std::max(asym, std::abs(it.value()));
    check(asym, scale, VectorXd(sparse.diagonal()));
    sparse = 0.5 * (sparse + t);
    sparse.makeCompressed();
  }
}

void ContactProblem::set_warm_start(VectorXd lambda) {
  require(lambda.size() == dim(), "warm start dimension mismatch");
  warm_start_ = std::move(lambda);
}

VectorXd ContactProblem::delassus_times(const VectorXd &x) const {
  return std::visit([&](const auto &G) -> VectorXd { return G * x; }, G_);
}

VectorXd ContactProblem::apply(const VectorXd &x) const {
  VectorXd out = delassus_times(x);
  out += R_.cwiseProduct(x);
  return out;
}

VectorXd ContactProblem::velocity(const VectorXd &lambda) const {
  if (lambda.size() != dim())
    throw std::invalid_argument("velocity: lambda dimension mismatch");
  VectorXd out = apply(lambda);
  out += g_;
  return out;
}

MatrixXd ContactProblem::dense_delassus() const {
  return std::visit([](const auto &G) -> MatrixXd { return MatrixXd(G); }, G_);
}

SparseMatrix ContactProblem::sparse_delassus() const {
  if (auto *sparse = std::get_if<SparseMatrix>(&G_))
    return *sparse;
  return std::get<MatrixXd>(G_).sparseView();
}

VectorXd ContactProblem::delassus_diagonal() const {
  return std::visit([](const auto &G) -> VectorXd { return G.diagonal(); },
                    G_);
}

Matrix3d ContactProblem::delassus_block(long i, long j) const {
  if (auto *dense = std::get_if<MatrixXd>(&G_))
    return dense->block<3, 3>(3 * i, 3 * j);
  return MatrixXd(std::get<SparseMatrix>(G_).block(3 * i, 3 * j, 3, 3));
}

ContactProblem ContactProblem::with_free_velocity(VectorXd g) const {
  if (g.size() != dim())
    throw std::invalid_argument("with_free_velocity: dimension mismatch");
  ContactProblem out = *this;
  out.g_ = std::move(g);
  out.warm_start_.reset();
  return out;
}

MatrixXd assemble_delassus(const MatrixXd &M, const MatrixXd &J) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("assemble_delassus: M must be square");
  if (J.cols() != M.rows())
    throw std::invalid_argument(
        "assemble_delassus: J columns must match M dimension");
  if (J.rows() % 3 != 0)
    throw std::invalid_argument(
        "assemble_delassus: J must have 3 rows per contact");

  // Eigen's LLT does not report where it broke down; a plain left-looking
  // factorization does.
  const long n = M.rows();
  MatrixXd Lf = MatrixXd::Zero(n, n);
  for (long j = 0; j < n; ++j) {
    double d = M(j, j) - Lf.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d))
      throw FactorizationError("assemble_delassus: mass matrix is not "
                               "positive definite (pivot " +
                                   std::to_string(j) + ")",
                               j);
    Lf(j, j) = std::sqrt(d);
    for (long i = j + 1; i < n; ++i)
      Lf(i, j) = (M(i, j) - Lf.row(i).head(j).dot(Lf.row(j).head(j))) / Lf(j, j);
  }
  const MatrixXd W =
      Lf.triangularView<Eigen::Lower>().solve(J.transpose());
  MatrixXd G = W.transpose() * W;
  return 0.5 * (G + G.transpose());
}

ResidualReport check_ncp(const ContactProblem &problem, const VectorXd &lambda,
                         bool desaxce_on) {
  if (lambda.size() != problem.dim())
    throw std::invalid_argument("check_ncp: lambda has " +
                                std::to_string(lambda.size()) +
                                " entries, expected " +
                                std::to_string(problem.dim()));
  const long nc = problem.num_contacts();
  ResidualReport r;
  r.signorini_comp.resize(nc);
  r.primal_cone_violation.resize(nc);
  r.dual_cone_violation.resize(nc);
  r.ncp_comp.resize(nc);
  const VectorXd sigma = problem.velocity(lambda);
  kernels::ncp_violations(lambda, sigma, problem.mu(), desaxce_on,
                          r.signorini_comp, r.primal_cone_violation,
                          r.dual_cone_violation, r.ncp_comp);
  // The cone complementarity relaxation does not enforce Signorini; the
  // term is still reported.
  if (nc > 0)
    r.max_violation = std::max({desaxce_on ? r.signorini_comp.maxCoeff() : 0.0,
                                r.primal_cone_violation.maxCoeff(),
                                r.dual_cone_violation.maxCoeff(),
                                r.ncp_comp.maxCoeff()});
  return r;
}

SpectrumEstimate estimate_spectrum(const ContactProblem &problem, int max_iter,
                                   double tol) {
  // Lanczos with full reorthogonalization: the Ritz values of the Krylov space
  // spanned by the power-iteration sequence. Plain power iteration on
  // L*Id - (G+R) stalls when the null space of a hyperstatic G sits next to
  // tiny nonzero eigenvalues.
  SpectrumEstimate est;
  const long n = problem.dim();
  if (n == 0)
    return est;
  const long kmax = std::min<long>(n, std::max(max_iter, 1));

  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  MatrixXd V(n, kmax);
  VectorXd v(n);
  for (long i = 0; i < n; ++i)
    v[i] = dist(rng);
  V.col(0) = v.normalized();

  std::vector<double> alpha, beta;
  double prev_min = 0.0, prev_max = 0.0;
  est.converged = false;
  for (long j = 0; j < kmax; ++j) {
    VectorXd w = problem.apply(V.col(j));
    alpha.push_back(V.col(j).dot(w));
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    const double b = w.norm();

    Eigen::SelfAdjointEigenSolver<MatrixXd> ritz;
    VectorXd diag = Eigen::Map<VectorXd>(alpha.data(), j + 1);
    VectorXd sub = Eigen::Map<VectorXd>(beta.data(), j);
    ritz.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    est.m = ritz.eigenvalues()[0];
    est.L = ritz.eigenvalues()[j];

    const double scale = std::max(std::abs(est.L), 1e-300);
    const bool exhausted = b <= 1e-12 * scale || j + 1 == n;
    const bool settled = j > 0 && std::abs(est.L - prev_max) <= tol * scale &&
                         std::abs(est.m - prev_min) <= tol * scale;
    if (exhausted || settled) {
      est.converged = true;
      break;
    }
    prev_min = est.m;
    prev_max = est.L;
    if (j + 1 < kmax) {
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
  }
  est.L = std::max(est.L, 0.0);
  est.m = std::clamp(est.m, 0.0, est.L);
  return est;
}

SpectrumEstimate condition_estimate(const ContactProblem &problem, double eta,
                                    double rho) {
  if (!(eta > 0.0) || !(rho > 0.0))
    throw std::invalid_argument("condition_estimate: eta and rho must be > 0");
  SpectrumEstimate est = estimate_spectrum(problem);
  est.m += eta + rho;
  est.L += eta + rho;
  return est;
}

} // namespace contact
