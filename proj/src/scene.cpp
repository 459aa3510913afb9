#include "contact/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

#include "contact/solver_admm.hpp"
#include "contact/solver_pgs.hpp"

namespace contact {

void Scene::validate() const {
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const Body &b = bodies[i];
    const std::string id = "body " + std::to_string(i);
    if (!(b.mass > 0.0) || !std::isfinite(b.mass))
      throw std::invalid_argument("Scene: " + id + " mass must be > 0");
    if (const auto *s = std::get_if<SphereShape>(&b.shape);
        s && !(s->radius > 0.0))
      throw std::invalid_argument("Scene: " + id + " radius must be > 0");
    if (const auto *box = std::get_if<BoxShape>(&b.shape);
        box && !(box->half_extents.array() > 0.0).all())
      throw std::invalid_argument("Scene: " + id +
                                  " half extents must be > 0");
  }
  if (!(friction_mu > 0.0))
    throw std::invalid_argument("Scene: friction coefficient must be > 0");
  if (!(margin >= 0.0))
    throw std::invalid_argument("Scene: margin must be >= 0");
}

double Scene::mu_between(int a, int b) const {
  const auto it = pair_mu.find({std::min(a, b), std::max(a, b)});
  return it == pair_mu.end() ? friction_mu : it->second;
}

Eigen::Matrix3d contact_frame(const Vector3d &normal) {
  const Vector3d n = normal.normalized();
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(n[k]) < std::abs(n[axis]))
      axis = k;
  const Vector3d t1 = n.cross(Vector3d::Unit(axis)).normalized();
  const Vector3d t2 = n.cross(t1);
  Eigen::Matrix3d frame;
  frame.row(0) = t1;
  frame.row(1) = t2;
  frame.row(2) = n;
  return frame;
}

namespace {

double bottom_offset(const Shape &shape) {
  if (const auto *s = std::get_if<SphereShape>(&shape))
    return s->radius;
  if (const auto *b = std::get_if<BoxShape>(&shape))
    return b->half_extents.z();
  return 0.0;
}

// Corners of [lo, hi] in the xy-plane, counter-clockwise.
std::array<Eigen::Vector2d, 4> rectangle_corners(const Eigen::Vector2d &lo,
                                                 const Eigen::Vector2d &hi) {
  return {Eigen::Vector2d(lo.x(), lo.y()), Eigen::Vector2d(hi.x(), lo.y()),
          Eigen::Vector2d(hi.x(), hi.y()), Eigen::Vector2d(lo.x(), hi.y())};
}

} // namespace

ContactSet detect_contacts(const Scene &scene) {
  ContactSet out;
  const int nb = static_cast<int>(scene.bodies.size());
  const Vector3d up = Vector3d::UnitZ();

  for (int i = 0; i < nb; ++i) {
    const Body &b = scene.bodies[i];
    const double gap = b.position.z() - bottom_offset(b.shape);
    if (gap > scene.margin)
      continue;
    const double mu = scene.mu_between(kGround, i);
    if (const auto *box = std::get_if<BoxShape>(&b.shape)) {
      const Eigen::Vector2d c = b.position.head<2>();
      const Eigen::Vector2d h = box->half_extents.head<2>();
      const auto corners = rectangle_corners(c - h, c + h);
      for (int k = 0; k < 4; ++k)
        out.push_back({kGround, i, Vector3d(corners[k].x(), corners[k].y(), 0.0),
                       up, gap, mu, k});
    } else {
      out.push_back({kGround, i,
                     Vector3d(b.position.x(), b.position.y(), 0.0), up, gap,
                     mu, 0});
    }
  }

  for (int i = 0; i < nb; ++i) {
    const auto *lower = std::get_if<BoxShape>(&scene.bodies[i].shape);
    if (!lower)
      continue;
    for (int j = 0; j < nb; ++j) {
      const auto *upper = std::get_if<BoxShape>(&scene.bodies[j].shape);
      if (j == i || !upper)
        continue;
      const Body &a = scene.bodies[i];
      const Body &b = scene.bodies[j];
      if (b.position.z() <= a.position.z())
        continue;
      const double top = a.position.z() + lower->half_extents.z();
      const double bottom = b.position.z() - upper->half_extents.z();
      const double gap = bottom - top;
      if (gap > scene.margin ||
          gap < -(lower->half_extents.z() + upper->half_extents.z()))
        continue;
      const Eigen::Vector2d lo =
          (a.position.head<2>() - lower->half_extents.head<2>())
              .cwiseMax(b.position.head<2>() - upper->half_extents.head<2>());
      const Eigen::Vector2d hi =
          (a.position.head<2>() + lower->half_extents.head<2>())
              .cwiseMin(b.position.head<2>() + upper->half_extents.head<2>());
      if ((hi.array() <= lo.array()).any())
        continue;
      const double mu = scene.mu_between(i, j);
      const auto corners = rectangle_corners(lo, hi);
      for (int k = 0; k < 4; ++k)
        out.push_back({i, j,
                       Vector3d(corners[k].x(), corners[k].y(),
                                0.5 * (top + bottom)),
                       up, gap, mu, k});
    }
  }
  return out;
}

StepProblem assemble_step_problem(const Scene &scene, const ContactSet &contacts,
                                  const VectorXd &tau, double dt,
                                  double baumgarte, Compliance compliance) {
  if (!(dt > 0.0))
    throw std::invalid_argument("assemble_step_problem: dt must be > 0");
  scene.validate();
  const long nb = static_cast<long>(scene.bodies.size());
  const long nv = 3 * nb;
  const long nc = static_cast<long>(contacts.size());
  if (tau.size() != 0 && tau.size() != nv)
    throw std::invalid_argument("assemble_step_problem: tau must have 3 "
                                "entries per body");

  StepProblem out;
  out.M_diag.resize(nv);
  out.v_free.resize(nv);
  for (long b = 0; b < nb; ++b) {
    const Body &body = scene.bodies[b];
    out.M_diag.segment<3>(3 * b).setConstant(body.mass);
    Vector3d force = body.mass * scene.gravity;
    if (tau.size())
      force += tau.segment<3>(3 * b);
    out.v_free.segment<3>(3 * b) = body.velocity + dt * force / body.mass;
  }

  out.J = MatrixXd::Zero(3 * nc, nv);
  out.gamma = VectorXd::Zero(3 * nc);
  VectorXd mu(nc), R(3 * nc);
  for (long k = 0; k < nc; ++k) {
    const Contact &c = contacts[k];
    const Eigen::Matrix3d frame = contact_frame(c.normal);
    out.J.block<3, 3>(3 * k, 3 * c.body_b) = frame;
    if (c.body_a != kGround)
      out.J.block<3, 3>(3 * k, 3 * c.body_a) = -frame;
    out.gamma[3 * k + 2] = c.separation >= 0.0
                               ? c.separation / dt
                               : baumgarte * c.separation / dt;
    mu[k] = c.mu;
    R.segment<3>(3 * k) << compliance.tangent, compliance.tangent,
        compliance.normal;
  }

  const MatrixXd M = out.M_diag.asDiagonal();
  MatrixXd G = assemble_delassus(M, out.J);
  out.problem = ContactProblem(std::move(G), out.J * out.v_free + out.gamma,
                               std::move(mu), std::move(R));
  return out;
}

namespace {

SolverResult run_solver(const StepOptions &opts, const ContactProblem &problem,
                        const std::optional<VectorXd> &warm) {
  SolverSettings settings = opts.settings;
  if (warm)
    settings.warm_start_policy = WarmStartPolicy::Provided;
  if (opts.solver == SolverKind::Pgs)
    return solve_pgs(problem, settings, opts.pgs_omega, warm);
  return solve_admm(problem, settings, warm);
}

void integrate(Scene &scene, const StepProblem &assembled,
               const VectorXd &lambda, double dt) {
  VectorXd v = assembled.v_free;
  if (lambda.size() && lambda.allFinite())
    v += (assembled.J.transpose() * lambda).cwiseQuotient(assembled.M_diag);
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    Body &body = scene.bodies[b];
    body.velocity = v.segment<3>(3 * b);
    body.position += dt * body.velocity;
  }
}

} // namespace

Simulator::Simulator(Scene scene, StepOptions options)
    : scene_(std::move(scene)), options_(std::move(options)) {
  scene_.validate();
  options_.settings.validate();
}

const StepRecord &Simulator::step(const VectorXd &tau) {
  StepRecord rec;
  rec.contacts = detect_contacts(scene_);
  rec.assembled =
      assemble_step_problem(scene_, rec.contacts, tau, options_.dt,
                            options_.baumgarte, options_.compliance);

  std::vector<std::array<int, 3>> keys;
  keys.reserve(rec.contacts.size());
  for (const auto &c : rec.contacts)
    keys.push_back({c.body_a, c.body_b, c.feature});
  std::optional<VectorXd> warm;
  if (options_.warm_start && !keys.empty() && keys == prev_keys_ &&
      prev_lambda_.allFinite())
    warm = prev_lambda_;
  rec.warm_started = warm.has_value();

  rec.result = run_solver(options_, rec.assembled.problem, warm);
  integrate(scene_, rec.assembled, rec.result.lambda, options_.dt);

  prev_keys_ = std::move(keys);
  prev_lambda_ = rec.result.lambda;
  ++steps_;
  last_ = std::move(rec);
  return last_;
}

Scene step(const Scene &scene, const VectorXd &tau, double dt,
           SolverKind solver, const SolverSettings &settings) {
  StepOptions opts;
  opts.dt = dt;
  opts.solver = solver;
  opts.settings = settings;
  opts.warm_start = false;
  Simulator sim(scene, opts);
  sim.step(tau);
  return sim.scene();
}

Scene make_stack_scene(int n_layers, double mass_ratio) {
  if (n_layers < 1)
    throw std::invalid_argument("make_stack_scene: need at least one layer");
  if (!(mass_ratio > 0.0))
    throw std::invalid_argument("make_stack_scene: mass ratio must be > 0");
  Scene scene;
  for (int k = 0; k < n_layers; ++k) {
    Body b;
    b.mass = n_layers == 1 ? 1.0
                           : std::pow(mass_ratio,
                                      static_cast<double>(k) / (n_layers - 1));
    b.position = Vector3d(0.0, 0.0, 0.5 + k);
    b.shape = BoxShape{Vector3d::Constant(0.5)};
    scene.bodies.push_back(b);
  }
  return scene;
}

} // namespace contact
