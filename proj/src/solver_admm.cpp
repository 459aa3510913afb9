#include "contact/solver_admm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "contact/cones.hpp"
#include "contact/kernels.hpp"

namespace contact {

std::string to_string(Status status) {
  switch (status) {
  case Status::Converged:
    return "Converged";
  case Status::MaxIter:
    return "MaxIter";
  case Status::NumericalFailure:
    return "NumericalFailure";
  }
  return "Unknown";
}

void SolverSettings::validate() const {
  auto require = [](bool cond, const char *msg) {
    if (!cond)
      throw std::invalid_argument(std::string("SolverSettings: ") + msg);
  };
  require(eps_abs > 0.0, "eps_abs must be > 0");
  require(eta > 0.0, "eta must be > 0");
  require(max_iter >= 0, "max_iter must be >= 0");
  require(alpha > 1.0, "alpha must be > 1");
  require(!rho_init || *rho_init > 0.0, "rho_init must be > 0");
  if (auto *lin = std::get_if<LinearRule>(&strategy)) {
    require(lin->tau_inc > 1.0 && lin->tau_dec > 1.0,
            "tau_inc and tau_dec must be > 1");
  } else {
    const auto &rule = std::get<SpectralRule>(strategy);
    require(rule.p_inc > 0.0 && rule.p_dec > 0.0,
            "p_inc and p_dec must be > 0");
  }
}

void write_trace_csv(std::ostream &out, const std::vector<TraceRow> &trace) {
  out << "iter,r_prim,r_dual,r_comp,rho\n";
  const auto old = out.precision(17);
  for (const auto &row : trace)
    out << row.iter << ',' << row.r_prim << ',' << row.r_dual << ','
        << row.r_comp << ',' << row.rho << '\n';
  out.precision(old);
}

ShiftedFactorization::ShiftedFactorization(const ContactProblem &problem,
                                           double shift) {
  if (problem.is_sparse()) {
    auto s = std::make_unique<Sparse>();
    s->base = problem.sparse_delassus();
    for (long i = 0; i < problem.dim(); ++i)
      s->base.coeffRef(i, i) += problem.R_diag()[i];
    s->base.makeCompressed();
    s->shifted = s->base;
    s->llt.analyzePattern(s->shifted);
    impl_ = std::move(s);
  } else {
    Dense d;
    d.base = problem.dense_delassus();
    d.base.diagonal() += problem.R_diag();
    impl_ = std::move(d);
  }
  refactor(shift);
}

bool ShiftedFactorization::refactor(double shift) {
  shift_ = shift;
  if (auto *d = std::get_if<Dense>(&impl_)) {
    MatrixXd A = d->base;
    A.diagonal().array() += shift;
    d->llt.compute(A);
    ok_ = d->llt.info() == Eigen::Success;
  } else {
    auto &s = *std::get<std::unique_ptr<Sparse>>(impl_);
    s.shifted = s.base;
    for (long i = 0; i < s.shifted.rows(); ++i)
      s.shifted.coeffRef(i, i) += shift;
    s.llt.factorize(s.shifted);
    ok_ = s.llt.info() == Eigen::Success;
  }
  return ok_;
}

VectorXd ShiftedFactorization::solve(const VectorXd &rhs) const {
  if (auto *d = std::get_if<Dense>(&impl_))
    return d->llt.solve(rhs);
  return std::get<std::unique_ptr<Sparse>>(impl_)->llt.solve(rhs);
}

ShiftedFactorization factorize_shifted(const ContactProblem &problem,
                                       double eta, double rho) {
  if (!(eta + rho > 0.0))
    throw std::invalid_argument("factorize_shifted: eta + rho must be > 0");
  return ShiftedFactorization(problem, eta + rho);
}

Residuals residuals(const VectorXd &f, const VectorXd &y, const VectorXd &z,
                    const VectorXd &prev_f, const VectorXd &prev_y, double rho,
                    double eta) {
  Residuals r;
  r.r_prim = f - y;
  r.r_dual = eta * (f - prev_f) + rho * (y - prev_y);
  const long nc = f.size() / 3;
  r.r_comp.resize(nc);
  for (long i = 0; i < nc; ++i)
    r.r_comp[i] = std::abs(f.segment<3>(3 * i).dot(z.segment<3>(3 * i)));
  return r;
}

RhoUpdate update_rho_linear(double r_prim_norm, double r_dual_norm, double rho,
                            double tau_inc, double tau_dec, double alpha) {
  const bool increase = r_prim_norm >= alpha * r_dual_norm;
  const bool decrease = r_dual_norm >= alpha * r_prim_norm;
  if (increase == decrease) // inside the tube, or both norms are zero
    return {rho, false};
  const double next = increase ? tau_inc * rho : rho / tau_dec;
  return {next, next != rho};
}

SpectralUpdate update_rho_spectral(double r_prim_norm, double r_dual_norm,
                                   double p, double m, double L, double p_inc,
                                   double p_dec, double alpha) {
  if (!(m > 0.0) || !(L >= m))
    throw std::invalid_argument("update_rho_spectral: requires 0 < m <= L");
  const bool increase = r_prim_norm >= alpha * r_dual_norm;
  const bool decrease = r_dual_norm >= alpha * r_prim_norm;
  const bool fired = increase != decrease;
  double next_p = p;
  if (fired)
    next_p = increase ? p + p_inc : p - p_dec;
  next_p = std::clamp(next_p, -kSpectralExponentBound, kSpectralExponentBound);
  const double rho = std::sqrt(m * L) * std::pow(L / m, next_p);
  return {rho, next_p, fired};
}

namespace {

bool finite(const VectorXd &v) { return v.allFinite(); }

} // namespace

SolverResult solve_admm(const ContactProblem &problem,
                        const SolverSettings &settings,
                        const std::optional<VectorXd> &warm) {
  settings.validate();
  const long n = problem.dim();
  const VectorXd &mu = problem.mu();
  SolverResult result;
  result.lambda = VectorXd::Zero(n);
  result.sigma = problem.g();
  result.desaxce_shift = VectorXd::Zero(n);
  if (n == 0)
    return result;

  const double eta = settings.eta;
  const auto *spectral = std::get_if<SpectralRule>(&settings.strategy);
  const auto *linear = std::get_if<LinearRule>(&settings.strategy);

  // Spectrum of G + R is rho-independent; the eta shift is added exactly.
  double m = 0.0, L = 0.0, p = 0.0;
  if (spectral) {
    const SpectrumEstimate est = estimate_spectrum(problem);
    m = est.m + eta;
    L = est.L + eta;
    p = spectral->p_init;
  }
  double rho = settings.rho_init.value_or(
      spectral ? std::sqrt(m * L) * std::pow(L / m, p) : 1.0);

  VectorXd f = VectorXd::Zero(n), y = VectorXd::Zero(n), z = VectorXd::Zero(n);
  if (settings.warm_start_policy == WarmStartPolicy::Provided) {
    const std::optional<VectorXd> &seed = warm ? warm : problem.warm_start();
    if (seed) {
      if (seed->size() != n)
        throw std::invalid_argument("solve_admm: warm start dimension "
                                    "mismatch");
      f = *seed;
      y = *seed;
      z = problem.velocity(*seed);
      if (settings.desaxce)
        z += desaxce(z, mu);
    }
  }

  ShiftedFactorization chol(problem, eta + rho);
  result.cholesky_updates = 1;
  if (!chol.ok()) {
    result.status = Status::NumericalFailure;
    result.failure_iteration = 0;
    return result;
  }

  VectorXd s = VectorXd::Zero(n), rhs(n), y_next(n);
  result.status = Status::MaxIter;
  for (int k = 1; k <= settings.max_iter; ++k) {
    if (settings.desaxce)
      kernels::desaxce(z, mu, s);

    rhs = problem.g() + s - eta * f - rho * y - z;
    const VectorXd f_next = -chol.solve(rhs);
    kernels::project_cone_product(f_next - z / rho, mu, y_next);
    const VectorXd z_next = z - rho * (f_next - y_next);

    const Residuals r = residuals(f_next, y_next, z_next, f, y, rho, eta);
    f = f_next;
    y = y_next;
    z = z_next;
    result.iterations = k;
    result.r_prim = r.prim_norm();
    result.r_dual = r.dual_norm();
    result.r_comp = r.comp_norm();
    if (settings.record_trace)
      result.trace.push_back(
          {k, result.r_prim, result.r_dual, result.r_comp, rho});

    if (!finite(f) || !finite(y) || !finite(z)) {
      result.status = Status::NumericalFailure;
      result.failure_iteration = k;
      break;
    }
    if (result.r_prim <= settings.eps_abs && result.r_dual <= settings.eps_abs &&
        result.r_comp <= settings.eps_abs) {
      result.status = Status::Converged;
      break;
    }

    double next_rho = rho;
    bool changed = false;
    if (spectral) {
      const SpectralUpdate u =
          update_rho_spectral(result.r_prim, result.r_dual, p, m, L,
                              spectral->p_inc, spectral->p_dec, settings.alpha);
      p = u.p;
      next_rho = u.rho;
      changed = u.changed;
    } else {
      const RhoUpdate u =
          update_rho_linear(result.r_prim, result.r_dual, rho, linear->tau_inc,
                            linear->tau_dec, settings.alpha);
      next_rho = u.rho;
      changed = u.changed;
    }
    if (changed && std::abs(next_rho - rho) > 1e-15 * rho) {
      rho = next_rho;
      ++result.cholesky_updates;
      if (!chol.refactor(eta + rho)) {
        result.status = Status::NumericalFailure;
        result.failure_iteration = k;
        break;
      }
    }
  }

  result.rho = rho;
  result.desaxce_shift = s;
  result.lambda = y;
  result.sigma = z;
  if (settings.desaxce)
    result.sigma -= desaxce(z, mu);
  return result;
}

} // namespace contact
