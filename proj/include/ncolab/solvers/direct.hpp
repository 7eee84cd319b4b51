#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "ncolab/envs/env.hpp"

namespace ncolab::solvers {

enum class ControlInit { Zeros, SmallUniform };

std::string to_string(ControlInit init);
ControlInit control_init_from_string(const std::string& s);

/// Settings of the direct method: Adam on the control knots with the
/// discrete adjoint gradient, then an L-BFGS polish of the best iterate.
struct DirectSolverConfig {
  int n_knots = 100;
  int max_iters = 3000;
  double lr0 = 0.05;
  double decay = 0.95;
  int decay_period = 200;
  double grad_tol = 1e-7;
  ControlInit u_init = ControlInit::Zeros;
  std::uint64_t seed = 0;
  int polish_iters = 2000;

  void validate() const;
  nlohmann::json to_json() const;
};

DirectSolverConfig direct_config_from_json(const nlohmann::json& j);

/// n_knots that fits the instance grid: cfg.n_knots when it does, otherwise
/// one knot per grid point (always required for Brachistochrone).
int effective_knots(const envs::OcpInstance& inst, const DirectSolverConfig& cfg);

struct Solution {
  envs::ControlGrid u_star;
  double J = 0.0;
  double grad_inf = 0.0;
  int iters_used = 0;
  double wall_time_seconds = 0.0;
  bool converged = false;
};

/// Minimizes eval_total_cost over the knots. Returns the best iterate seen;
/// converged iff its gradient max-norm is below grad_tol. A non-finite
/// iterate ends the run with the last finite best and converged = false.
Solution solve_direct(const envs::OcpInstance& inst, const DirectSolverConfig& cfg);

nlohmann::json solution_to_json(const envs::OcpInstance& inst, const Solution& sol);

}  // namespace ncolab::solvers
