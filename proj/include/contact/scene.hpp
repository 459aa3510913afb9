#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "contact/problem.hpp"
#include "contact/solver.hpp"

namespace contact {

using Eigen::Vector3d;

struct PointShape {};
struct SphereShape {
  double radius;
};
struct BoxShape {
  Vector3d half_extents;
};
using Shape = std::variant<PointShape, SphereShape, BoxShape>;

/// Translation-only rigid body.
struct Body {
  double mass = 1.0;
  Vector3d position = Vector3d::Zero();
  Vector3d velocity = Vector3d::Zero();
  Shape shape = PointShape{};
};

inline constexpr int kGround = -1;

/// Toy world: bodies above the half-space z >= 0.
struct Scene {
  std::vector<Body> bodies;
  Vector3d gravity{0.0, 0.0, -9.81};
  double friction_mu = 0.5;
  /// Overrides keyed by (body_a, body_b) with body_a < body_b, ground = -1.
  std::map<std::pair<int, int>, double> pair_mu;
  double margin = 1e-4;

  void validate() const;
  double mu_between(int a, int b) const;
  long num_dofs() const { return 3 * static_cast<long>(bodies.size()); }
};

/// Contact on body_b (upper) against body_a (lower, or kGround); the normal
/// points from a towards b.
struct Contact {
  int body_a = kGround;
  int body_b = 0;
  Vector3d point = Vector3d::Zero();
  Vector3d normal{0.0, 0.0, 1.0};
  double separation = 0.0;
  double mu = 0.5;
  int feature = 0; ///< corner index for box contacts
};

using ContactSet = std::vector<Contact>;

/// Sphere/point/box against the ground, axis-aligned box on box.
ContactSet detect_contacts(const Scene &scene);

/// Rows T1, T2, N. T1 = normalize(n x e) with e the coordinate axis least
/// aligned with n, T2 = n x T1.
Eigen::Matrix3d contact_frame(const Vector3d &normal);

struct Compliance {
  double normal = 0.0;
  double tangent = 0.0;
};

struct StepProblem {
  ContactProblem problem;
  MatrixXd J;       ///< 3 n_c x n_v, rows [T1, T2, N] per contact
  VectorXd M_diag;  ///< diagonal of the joint-space inertia
  VectorXd v_free;  ///< v + dt M^{-1} (tau + gravity)
  VectorXd gamma;   ///< corrective term added to J v_free
};

/// Builds the NCP for one symplectic Euler step. tau holds one external force
/// per body (3 n_bodies entries, may be empty). Throws on dt <= 0.
StepProblem assemble_step_problem(const Scene &scene, const ContactSet &contacts,
                                  const VectorXd &tau, double dt,
                                  double baumgarte = 0.2,
                                  Compliance compliance = {});

enum class SolverKind { Admm, Pgs };

struct StepOptions {
  double dt = 1e-3;
  SolverKind solver = SolverKind::Admm;
  SolverSettings settings;
  double pgs_omega = 1.0;
  double baumgarte = 0.2;
  Compliance compliance;
  bool warm_start = true;
};

struct StepRecord {
  ContactSet contacts;
  StepProblem assembled;
  SolverResult result;
  bool warm_started = false;
};

/// Sequential stepper. Keeps the previous impulses and warm-starts the next
/// solve when the contact set is unchanged (same pairs and corners).
class Simulator {
public:
  Simulator(Scene scene, StepOptions options);

  const StepRecord &step(const VectorXd &tau = VectorXd());
  const Scene &scene() const { return scene_; }
  const StepOptions &options() const { return options_; }
  StepOptions &options() { return options_; }
  const StepRecord &last() const { return last_; }
  long steps_taken() const { return steps_; }

private:
  Scene scene_;
  StepOptions options_;
  StepRecord last_;
  std::vector<std::array<int, 3>> prev_keys_;
  VectorXd prev_lambda_;
  long steps_ = 0;
};

/// One cold-started step.
Scene step(const Scene &scene, const VectorXd &tau, double dt,
           SolverKind solver, const SolverSettings &settings);

/// Unit boxes stacked on the ground, masses geometrically spaced from 1 kg
/// (bottom) to mass_ratio kg (top).
Scene make_stack_scene(int n_layers, double mass_ratio);

} // namespace contact
