#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ncolab::envs {

/// Control environments. `Linear` is the scalar system xdot = a x + b u used
/// by the closed-form checks (static system, integrator, LQ toy problems).
enum class EnvId {
  Pendulum,
  RobotArm,
  CartPole,
  Quadrotor,
  Rocket,
  Brachistochrone,
  Zermelo,
  Linear,
};

std::string to_string(EnvId id);
EnvId env_from_string(std::string_view name);
const std::vector<EnvId>& synthetic_envs();

/// Physical constants and dimensions of one environment.
///
/// Constants are stored positionally; `constant_names(id)` gives the order.
///   Pendulum         m g l I b
///   RobotArm         m1 m2 l1 l2 r1 r2 I1 I2 g
///   CartPole         mc mp l g
///   Quadrotor        m g l c Jx Jy Jz
///   Rocket           m g l Jx Jy Jz
///   Brachistochrone  g x1 x2
///   Zermelo          V A B C D
///   Linear           a b
struct EnvSpec {
  EnvId id = EnvId::Pendulum;
  Eigen::VectorXd constants;
  int d_x = 0;
  int d_u = 0;
  bool quaternion = false;

  double constant(std::string_view name) const;
  void set_constant(std::string_view name, double value);

  /// Finite constants; masses, lengths and inertias strictly positive.
  void validate() const;

  /// Dimension of the integrated state (state plus quaternion when present).
  int d_z() const { return d_x + (quaternion ? 4 : 0); }

  /// Environments integrated by rollout_euler.
  bool has_dynamics() const { return id != EnvId::Brachistochrone; }
};

const std::vector<std::string>& constant_names(EnvId id);
EnvSpec make_env(EnvId id);

/// Terminal cost h. Every synthetic environment uses h = 0.
enum class TerminalCost { Zero };

struct CostSpec {
  Eigen::VectorXd x_goal;
  Eigen::VectorXd c_x;
  double c_u = 0.1;
  TerminalCost terminal = TerminalCost::Zero;

  void validate(int d_x) const;
};

CostSpec make_cost(EnvId id);

/// One optimal control problem.
struct OcpInstance {
  EnvSpec env;
  CostSpec cost;
  Eigen::VectorXd x_init;
  std::optional<Eigen::Vector4d> q_init;
  double tf = 1.0;
  int n_grid = 100;

  double dt() const { return tf / static_cast<double>(n_grid - 1); }
  int n_intervals() const { return n_grid - 1; }
  void validate() const;
};

/// Default instance for each environment.
OcpInstance make_instance(EnvId id);

/// Piecewise-constant control: row k is held on the k-th block of uniform
/// subintervals of [0, tf].
struct ControlGrid {
  Eigen::MatrixXd values;  // n_knots x d_u

  int n_knots() const { return static_cast<int>(values.rows()); }
  int d_u() const { return static_cast<int>(values.cols()); }
  void validate() const;

  static ControlGrid zeros(int n_knots, int d_u) {
    return ControlGrid{Eigen::MatrixXd::Zero(n_knots, d_u)};
  }
};

/// Knot used on Euler interval k. n_knots must either equal n_grid (one knot
/// per grid point, the last one only describes the terminal time) or divide
/// n_grid - 1.
int knot_for_interval(int n_knots, int n_grid, int k);
void check_knots(int n_knots, int n_grid);

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;                     // n_grid x d_x
  std::optional<Eigen::MatrixXd> quaternions;  // n_grid x 4
};

nlohmann::json instance_to_json(const OcpInstance& inst);
OcpInstance instance_from_json(const nlohmann::json& j);

}  // namespace ncolab::envs
