#include "contact/scene_io.hpp"

#include <ostream>
#include <stdexcept>

#include "contact/problem_io.hpp"
#include "contact/solver_pgs.hpp"

namespace contact {

using nlohmann::json;

namespace {

Vector3d vec3(const json &j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3)
    throw std::invalid_argument("scene: expected a 3-vector");
  return {v[0], v[1], v[2]};
}

Body body_from_json(const json &j) {
  Body b;
  b.mass = j.value("mass", 1.0);
  if (j.contains("position"))
    b.position = vec3(j.at("position"));
  if (j.contains("velocity"))
    b.velocity = vec3(j.at("velocity"));
  const std::string shape = j.value("shape", std::string("point"));
  if (shape == "point")
    b.shape = PointShape{};
  else if (shape == "sphere")
    b.shape = SphereShape{j.at("radius").get<double>()};
  else if (shape == "box")
    b.shape = BoxShape{vec3(j.at("half_extents"))};
  else
    throw std::invalid_argument("scene: unknown shape \"" + shape + "\"");
  return b;
}

} // namespace

SimulationConfig simulation_from_json(const json &j) {
  try {
    SimulationConfig cfg;
    Scene &scene = cfg.scene;
    StepOptions &opts = cfg.options;
    for (const auto &b : j.at("bodies"))
      scene.bodies.push_back(body_from_json(b));
    if (j.contains("gravity"))
      scene.gravity = vec3(j.at("gravity"));
    scene.friction_mu = j.value("mu", scene.friction_mu);
    scene.margin = j.value("margin", scene.margin);

    cfg.steps = j.value("steps", cfg.steps);
    opts.dt = j.value("dt", opts.dt);
    opts.baumgarte = j.value("baumgarte", opts.baumgarte);
    opts.pgs_omega = j.value("omega", opts.pgs_omega);
    opts.warm_start = j.value("warm_start", opts.warm_start);
    if (j.contains("compliance")) {
      opts.compliance.normal = j.at("compliance").value("normal", 0.0);
      opts.compliance.tangent = j.at("compliance").value("tangent", 0.0);
    }
    const std::string solver = j.value("solver", std::string("admm"));
    if (solver == "admm")
      opts.solver = SolverKind::Admm;
    else if (solver == "pgs")
      opts.solver = SolverKind::Pgs;
    else
      throw std::invalid_argument("scene: unknown solver \"" + solver + "\"");
    if (opts.solver == SolverKind::Pgs)
      opts.settings = pgs_default_settings();
    const std::string strategy = j.value("strategy", std::string("spectral"));
    if (strategy == "linear")
      opts.settings.strategy = LinearRule{};
    else if (strategy != "spectral")
      throw std::invalid_argument("scene: unknown strategy \"" + strategy +
                                  "\"");
    opts.settings.eps_abs = j.value("eps", opts.settings.eps_abs);
    opts.settings.max_iter = j.value("max_iter", opts.settings.max_iter);
    opts.settings.eta = j.value("eta", opts.settings.eta);
    opts.settings.desaxce = j.value("desaxce", true);
    scene.validate();
    opts.settings.validate();
    return cfg;
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string("scene: ") + e.what());
  }
}

SimulationConfig read_simulation(const std::filesystem::path &path) {
  return simulation_from_json(read_json_file(path));
}

void write_trajectory_header(std::ostream &out) {
  out << "step,body,px,py,pz,vx,vy,vz,n_contacts,status,iterations,"
         "cholesky_updates\n";
}

void write_trajectory_rows(std::ostream &out, long step, const Scene &scene,
                           const StepRecord &record) {
  for (std::size_t b = 0; b < scene.bodies.size(); ++b) {
    const Body &body = scene.bodies[b];
    out << step << ',' << b;
    for (int k = 0; k < 3; ++k)
      out << ',' << format_double(body.position[k]);
    for (int k = 0; k < 3; ++k)
      out << ',' << format_double(body.velocity[k]);
    out << ',' << record.contacts.size() << ','
        << to_string(record.result.status) << ',' << record.result.iterations
        << ',' << record.result.cholesky_updates << '\n';
  }
}

} // namespace contact
