#include "ncolab/envs/rollout.hpp"

#include "ncolab/envs/brachistochrone.hpp"

namespace ncolab::envs {

namespace {

std::vector<double> row_major(const ControlGrid& u) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(u.values.size()));
  for (Eigen::Index r = 0; r < u.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.values.cols(); ++c) out.push_back(u.values(r, c));
  }
  return out;
}

void check_controls(const OcpInstance& inst, const ControlGrid& u) {
  u.validate();
  if (u.d_u() != inst.env.d_u) {
    throw DimensionError("control grid has " + std::to_string(u.d_u()) + " columns, " +
                         to_string(inst.env.id) + " has " + std::to_string(inst.env.d_u) +
                         " controls");
  }
  check_knots(u.n_knots(), inst.n_grid);
}

}  // namespace

Eigen::VectorXd initial_state(const OcpInstance& inst) {
  Eigen::VectorXd z(inst.env.d_z());
  z.head(inst.env.d_x) = inst.x_init;
  if (inst.q_init) z.tail(4) = *inst.q_init;
  return z;
}

Trajectory rollout_euler(const OcpInstance& inst, const ControlGrid& u) {
  inst.validate();
  if (!inst.env.has_dynamics()) throw ConfigError("brachistochrone has no state equation");
  check_controls(inst, u);
  const Eigen::VectorXd z0 = initial_state(inst);
  const std::vector<double> knots = row_major(u);
  std::vector<std::vector<double>> states;
  states.reserve(static_cast<std::size_t>(inst.n_grid));
  total_cost_generic<double>(inst, std::vector<double>(z0.data(), z0.data() + z0.size()),
                             knots, u.n_knots(), inst.dt(), &states);
  Trajectory traj;
  traj.times = Eigen::VectorXd::LinSpaced(inst.n_grid, 0.0, inst.tf);
  traj.states.resize(inst.n_grid, inst.env.d_x);
  if (inst.env.quaternion) traj.quaternions = Eigen::MatrixXd(inst.n_grid, 4);
  for (int k = 0; k < inst.n_grid; ++k) {
    const auto& z = states[static_cast<std::size_t>(k)];
    for (int i = 0; i < inst.env.d_x; ++i) traj.states(k, i) = z[static_cast<std::size_t>(i)];
    if (traj.quaternions) {
      for (int i = 0; i < 4; ++i) {
        (*traj.quaternions)(k, i) = z[static_cast<std::size_t>(inst.env.d_x + i)];
      }
    }
  }
  return traj;
}

double eval_total_cost(const OcpInstance& inst, const ControlGrid& u) {
  inst.validate();
  check_controls(inst, u);
  if (inst.env.id == EnvId::Brachistochrone) {
    if (u.n_knots() != inst.n_grid) {
      throw DimensionError("brachistochrone curve needs one height per grid point");
    }
    std::vector<double> y(u.values.col(0).data(), u.values.col(0).data() + u.n_knots());
    y.front() = inst.x_init[0];
    y.back() = inst.cost.x_goal[0];
    return brachistochrone_time(y, inst.x_init[0], inst.dt(), inst.env.constant("g"));
  }
  const Eigen::VectorXd z0 = initial_state(inst);
  return total_cost_generic<double>(inst, std::vector<double>(z0.data(), z0.data() + z0.size()),
                                    row_major(u), u.n_knots(), inst.dt());
}

double brachistochrone_time(std::span<const double> y, double y1, double h, double g) {
  return brachistochrone_time_generic<double>(y, y1, h, g);
}

}  // namespace ncolab::envs
