#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "contact/scene.hpp"

namespace contact {

struct SimulationConfig {
  Scene scene;
  StepOptions options;
  int steps = 1000;
};

/// Scene file schema (all keys but "bodies" optional):
///   { "dt": 1e-3, "steps": 1000, "solver": "admm" | "pgs",
///     "strategy": "spectral" | "linear", "eps": 1e-6, "max_iter": 1000,
///     "eta": 1e-6, "omega": 1.0, "desaxce": true, "warm_start": true,
///     "gravity": [0, 0, -9.81], "mu": 0.5, "margin": 1e-4,
///     "baumgarte": 0.2, "compliance": {"normal": 0, "tangent": 0},
///     "bodies": [ { "mass": 1, "position": [...], "velocity": [...],
///                   "shape": "point" | "sphere" | "box",
///                   "radius": r, "half_extents": [...] } ] }
SimulationConfig simulation_from_json(const nlohmann::json &j);
SimulationConfig read_simulation(const std::filesystem::path &path);

/// `step,body,px,py,pz,vx,vy,vz,n_contacts,status,iterations,cholesky_updates`
void write_trajectory_header(std::ostream &out);
void write_trajectory_rows(std::ostream &out, long step, const Scene &scene,
                           const StepRecord &record);

} // namespace contact
