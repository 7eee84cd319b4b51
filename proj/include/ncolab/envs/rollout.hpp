#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncolab/core/error.hpp"
#include "ncolab/core/tape.hpp"
#include "ncolab/envs/dynamics.hpp"
#include "ncolab/envs/env.hpp"

namespace ncolab::envs {

/// Explicit Euler rollout x_{k+1} = x_k + dt f(x_k, u_k) on the instance grid.
/// Throws DivergenceError at the first non-finite state.
Trajectory rollout_euler(const OcpInstance& inst, const ControlGrid& u);

/// Left-rectangle cost sum_k dt [c_x . (x_k - x_goal)^2 + c_u |u_k|^2] over the
/// n_grid - 1 Euler intervals (terminal cost is zero). For Brachistochrone the
/// grid holds the curve heights and the cost is the travel time.
double eval_total_cost(const OcpInstance& inst, const ControlGrid& u);

/// Initial augmented state [x_init, q_init].
Eigen::VectorXd initial_state(const OcpInstance& inst);

/// Rollout and cost over any scalar type. `knots` is the control grid in
/// row-major order (n_knots x d_u), `z` the initial augmented state. When
/// `states` is given, the augmented state at every grid point is appended.
template <class T, class D>
T total_cost_generic(const OcpInstance& inst, std::vector<T> z, std::span<const T> knots,
                     int n_knots, const D& dt, std::vector<std::vector<T>>* states = nullptr) {
  const auto& env = inst.env;
  const int d_x = env.d_x;
  const int d_u = env.d_u;
  const int n_int = inst.n_intervals();
  check_knots(n_knots, inst.n_grid);
  if (knots.size() != static_cast<std::size_t>(n_knots * d_u)) {
    throw DimensionError("control grid holds " + std::to_string(knots.size()) +
                         " values, expected " + std::to_string(n_knots * d_u));
  }
  std::vector<T> scratch;
  if (states) states->push_back(z);
  T total = core::constant_like(z[0], 0.0);
  for (int k = 0; k < n_int; ++k) {
    const int knot = knot_for_interval(n_knots, inst.n_grid, k);
    const std::span<const T> u = knots.subspan(static_cast<std::size_t>(knot * d_u),
                                               static_cast<std::size_t>(d_u));
    T running = core::constant_like(z[0], 0.0);
    for (int i = 0; i < d_x; ++i) {
      const double c = inst.cost.c_x[i];
      if (c == 0.0) continue;
      const T e = z[static_cast<std::size_t>(i)] - inst.cost.x_goal[i];
      running = running + c * (e * e);
    }
    for (int j = 0; j < d_u; ++j) running = running + inst.cost.c_u * (u[j] * u[j]);
    total = total + dt * running;
    euler_step(env, z, u, dt, scratch);
    for (const auto& v : z) {
      if (!std::isfinite(core::value_of(v))) {
        throw DivergenceError("rollout diverged at step " + std::to_string(k + 1), k + 1);
      }
    }
    if (states) states->push_back(z);
  }
  return total;
}

}  // namespace ncolab::envs
