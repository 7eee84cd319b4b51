#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ncolab/envs/brachistochrone.hpp"
#include "ncolab/envs/dynamics.hpp"
#include "ncolab/envs/env.hpp"
#include "ncolab/envs/rollout.hpp"

using namespace ncolab;
using namespace ncolab::envs;

namespace {

constexpr double kPi = std::numbers::pi;

OcpInstance linear_instance(double a, double b, double x0, double goal, double c_x, double c_u,
                            double tf, int n_grid) {
  OcpInstance inst = make_instance(EnvId::Linear);
  inst.env.constants << a, b;
  inst.x_init << x0;
  inst.cost.x_goal << goal;
  inst.cost.c_x << c_x;
  inst.cost.c_u = c_u;
  inst.tf = tf;
  inst.n_grid = n_grid;
  return inst;
}

}  // namespace

TEST(EnvSpec, DimensionsPerEnvironment) {
  const std::vector<std::pair<EnvId, std::pair<int, int>>> dims = {
      {EnvId::Pendulum, {1, 2}},  {EnvId::RobotArm, {1, 4}}, {EnvId::CartPole, {1, 4}},
      {EnvId::Quadrotor, {4, 9}}, {EnvId::Rocket, {3, 9}},
  };
  for (const auto& [id, du_dx] : dims) {
    const auto env = make_env(id);
    EXPECT_EQ(env.d_u, du_dx.first) << to_string(id);
    EXPECT_EQ(env.d_x, du_dx.second) << to_string(id);
    EXPECT_NO_THROW(make_instance(id).validate()) << to_string(id);
  }
  EXPECT_EQ(env_from_string("Quadrotor"), EnvId::Quadrotor);
  EXPECT_THROW(env_from_string("pusher"), ConfigError);
}

TEST(EnvSpec, RejectsNonPositiveMass) {
  auto env = make_env(EnvId::Pendulum);
  env.set_constant("m", 0.0);
  EXPECT_THROW(env.validate(), DomainError);
  env.set_constant("m", std::nan(""));
  EXPECT_THROW(env.validate(), NumericalError);
}

TEST(OcpInstance, ValidationErrors) {
  auto inst = make_instance(EnvId::Quadrotor);
  inst.q_init.reset();
  EXPECT_THROW(inst.validate(), SchemaError);
  inst = make_instance(EnvId::Pendulum);
  inst.tf = 0.0;
  EXPECT_THROW(inst.validate(), DomainError);
  inst = make_instance(EnvId::Pendulum);
  inst.x_init = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(inst.validate(), DimensionError);
}

TEST(OcpInstance, JsonRoundTrip) {
  for (EnvId id : {EnvId::Pendulum, EnvId::Rocket, EnvId::Brachistochrone, EnvId::Zermelo}) {
    const auto inst = make_instance(id);
    const auto back = instance_from_json(instance_to_json(inst));
    EXPECT_EQ(back.env.constants, inst.env.constants);
    EXPECT_EQ(back.x_init, inst.x_init);
    EXPECT_EQ(back.cost.x_goal, inst.cost.x_goal);
    EXPECT_EQ(back.q_init.has_value(), inst.q_init.has_value());
    EXPECT_EQ(back.n_grid, inst.n_grid);
  }
  auto j = instance_to_json(make_instance(EnvId::Pendulum));
  j.erase("x_init");
  EXPECT_THROW(instance_from_json(j), SchemaError);
}

TEST(Dynamics, PendulumEquilibriumAndSubstitution) {
  const auto env = make_env(EnvId::Pendulum);
  const auto d0 = eval_dynamics(env, Eigen::Vector2d(0.0, 0.0), Eigen::VectorXd::Zero(1));
  EXPECT_EQ(d0.dx, Eigen::Vector2d(0.0, 0.0));
  const auto d = eval_dynamics(env, Eigen::Vector2d(kPi / 2.0, 1.0), Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(d.dx[0], 1.0, 1e-15);
  EXPECT_NEAR(d.dx[1], -30.0, 1e-12);
}

TEST(Dynamics, QuadrotorAtRestFallsAlongZ) {
  const auto env = make_env(EnvId::Quadrotor);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(9);
  x.segment(3, 3) << 0.5, -1.0, 2.0;
  const auto d = eval_dynamics(env, x, Eigen::VectorXd::Zero(4), Eigen::Vector4d(1, 0, 0, 0));
  EXPECT_EQ(d.dx.head(3), x.segment(3, 3));
  EXPECT_EQ(d.dx.segment(3, 3), Eigen::Vector3d(0.0, 0.0, 10.0));
  EXPECT_EQ(d.dx.tail(3), Eigen::Vector3d::Zero());
  EXPECT_EQ(*d.dq, Eigen::Vector4d::Zero());
}

TEST(Dynamics, QuadrotorMatchesMatrixForm) {
  const auto env = make_env(EnvId::Quadrotor);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(9);
    for (int i = 0; i < 9; ++i) x[i] = n(rng);
    Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    Eigen::Vector4d u(n(rng), n(rng), n(rng), n(rng));
    const auto d = eval_dynamics(env, x, u, q);
    const Eigen::Vector3d w = x.tail(3);
    const auto [omega, r] = quaternion_matrices(q, w);
    const double l = 0.4, c = 0.01;
    Eigen::Matrix<double, 3, 4> t;
    t << 0, -l / 2, 0, l / 2, -l / 2, 0, l / 2, 0, c, -c, c, -c;
    const Eigen::Vector3d thrust(0.0, 0.0, u.sum());
    const Eigen::Vector3d dv = Eigen::Vector3d(0, 0, 10.0) + r.transpose() * thrust;
    const Eigen::Vector3d dw = t * u - w.cross(w);  // J = I
    EXPECT_LT((d.dx.segment(3, 3) - dv).norm(), 1e-12);
    EXPECT_LT((d.dx.tail(3) - dw).norm(), 1e-12);
    EXPECT_LT((*d.dq - 0.5 * omega * q).norm(), 1e-12);
  }
}

TEST(Dynamics, RocketTorqueIsCrossProduct) {
  const auto env = make_env(EnvId::Rocket);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(9);
  const Eigen::Vector3d u(0.3, -1.2, 2.0);
  const auto d = eval_dynamics(env, x, u, Eigen::Vector4d(1, 0, 0, 0));
  const Eigen::Vector3d tau = Eigen::Vector3d(-0.5, 0.0, 0.0).cross(u);
  const Eigen::Vector3d j(0.5, 1.0, 1.0);
  EXPECT_LT((d.dx.tail(3) - tau.cwiseQuotient(j)).norm(), 1e-15);
  EXPECT_LT((d.dx.segment(3, 3) - (Eigen::Vector3d(10, 0, 0) + u)).norm(), 1e-15);
}

TEST(Dynamics, CartPoleAgainstClosedForm) {
  const auto env = make_env(EnvId::CartPole);
  const Eigen::Vector4d x(0.2, 0.7, -0.3, 1.1);
  const double u = 0.4, mc = 0.1, mp = 0.1, l = 1.0, g = 10.0;
  const double s = std::sin(x[1]), c = std::cos(x[1]);
  const double den = mc + mp * s * s;
  const double a3 = (u + mp * s * (l * x[3] * x[3] + g * c)) / den;
  const double a4 = (-u * c - mp * l * x[3] * x[3] * c * s - (mc + mp) * g * s) / (l * den);
  const auto d = eval_dynamics(env, x, Eigen::VectorXd::Constant(1, u));
  EXPECT_NEAR(d.dx[2], a3, 1e-13);
  EXPECT_NEAR(d.dx[3], a4, 1e-13);
}

TEST(Dynamics, RobotArmSolvesManipulatorEquation) {
  auto env = make_env(EnvId::RobotArm);
  env.set_constant("g", 9.81);  // exercise the gravity vector too
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Vector4d x(d(rng), d(rng), d(rng), d(rng));
    const double u = d(rng);
    const auto out = eval_dynamics(env, x, Eigen::VectorXd::Constant(1, u));
    const Eigen::Matrix2d m = robotarm_mass_matrix(env, x[1]);
    const double h = 1.0 * 1.0 * 0.5 * std::sin(x[1]);
    Eigen::Matrix2d cm;
    cm << -h * x[3], -h * (x[2] + x[3]), h * x[2], 0.0;
    const double g = 9.81;
    const Eigen::Vector2d gv(0.5 * g * std::cos(x[0]) +
                                 g * (0.5 * std::cos(x[0] + x[1]) + std::cos(x[0])),
                             0.5 * g * std::cos(x[0] + x[1]));
    const Eigen::Vector2d lhs = m * out.dx.tail(2) + cm * x.tail(2) + gv;
    EXPECT_NEAR(lhs[0], 0.0, 1e-11);
    EXPECT_NEAR(lhs[1], u, 1e-11);
  }
}

TEST(Dynamics, RobotArmMassMatrixPositiveDefinite) {
  const auto env = make_env(EnvId::RobotArm);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Matrix2d m = robotarm_mass_matrix(env, d(rng));
    EXPECT_EQ(m, m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Dynamics, RobotArmSingularMatrixRaises) {
  auto env = make_env(EnvId::RobotArm);
  // m1 r1^2 + I1 -> tiny and r2 = l1 make M singular at x2 = 0.
  env.set_constant("m1", 1e-20);
  env.set_constant("I1", 1e-20);
  env.set_constant("I2", 1e-20);
  env.set_constant("r2", 1.0);
  EXPECT_THROW(eval_dynamics(env, Eigen::Vector4d::Zero(), Eigen::VectorXd::Zero(1)),
               NumericalError);
}

TEST(Dynamics, DimensionMismatch) {
  const auto env = make_env(EnvId::Pendulum);
  EXPECT_THROW(eval_dynamics(env, Eigen::Vector3d::Zero(), Eigen::VectorXd::Zero(1)),
               DimensionError);
}

TEST(Quaternion, MatricesExamples) {
  const auto [omega, r] = quaternion_matrices(Eigen::Vector4d(1, 0, 0, 0), Eigen::Vector3d::Zero());
  EXPECT_EQ(omega, Eigen::Matrix4d::Zero());
  EXPECT_EQ(r, Eigen::Matrix3d::Identity());
  const double h = std::cos(kPi / 4.0);
  const auto rz = quaternion_matrices(Eigen::Vector4d(h, 0, 0, std::sin(kPi / 4.0)),
                                      Eigen::Vector3d::Zero())
                      .second;
  EXPECT_LT((rz * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(0, 1, 0)).norm(), 1e-12);
  EXPECT_THROW(quaternion_matrices(Eigen::Vector4d(1, 1, 0, 0), Eigen::Vector3d::Zero()),
               DomainError);
}

TEST(Rollout, IntegratorIsExactForConstantControl) {
  const auto inst = linear_instance(0.0, 1.0, 0.0, 0.0, 1.0, 0.1, 1.0, 101);
  ControlGrid u{Eigen::MatrixXd::Ones(100, 1)};
  const auto traj = rollout_euler(inst, u);
  EXPECT_NEAR(traj.states(100, 0), 1.0, 1e-14);
  EXPECT_EQ(traj.states(0, 0), 0.0);
  EXPECT_NEAR(traj.times[100], 1.0, 1e-15);
}

TEST(Rollout, EquilibriumStaysConstant) {
  const auto inst = make_instance(EnvId::Pendulum);
  const auto traj = rollout_euler(inst, ControlGrid::zeros(99, 1));
  EXPECT_EQ(traj.states.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rollout, PendulumMatchesHandRolledEuler) {
  auto inst = make_instance(EnvId::Pendulum);
  inst.x_init << kPi / 2.0, 0.0;
  inst.tf = 0.1;
  inst.n_grid = 11;
  const auto traj = rollout_euler(inst, ControlGrid::zeros(10, 1));
  double th = kPi / 2.0, om = 0.0;
  const double dt = 0.01;
  for (int k = 0; k < 10; ++k) {
    const double dth = om;
    const double dom = (0.0 - 1.0 * 10.0 * 1.0 * std::sin(th)) / (1.0 / 3.0);
    th += dt * dth;
    om += dt * dom;
  }
  EXPECT_NEAR(traj.states(10, 0), th, 1e-13);
  EXPECT_NEAR(traj.states(10, 1), om, 1e-13);
}

TEST(Rollout, LinearSystemMatchesClosedFormRecursion) {
  const auto inst = linear_instance(-1.3, 0.0, 2.0, 0.0, 1.0, 0.1, 1.0, 51);
  const auto traj = rollout_euler(inst, ControlGrid::zeros(50, 1));
  const double dt = 1.0 / 50.0;
  for (int k = 0; k <= 50; ++k) {
    EXPECT_NEAR(traj.states(k, 0), std::pow(1.0 - 1.3 * dt, k) * 2.0, 1e-12);
  }
}

TEST(Rollout, KnotLayouts) {
  const auto inst = linear_instance(0.0, 1.0, 0.0, 0.0, 1.0, 0.1, 1.0, 101);
  // 20 knots over 100 intervals: each knot covers 5 intervals.
  Eigen::MatrixXd v(20, 1);
  for (int i = 0; i < 20; ++i) v(i, 0) = i;
  const auto traj = rollout_euler(inst, ControlGrid{v});
  double x = 0.0;
  for (int k = 0; k < 100; ++k) x += 0.01 * (k / 5);
  EXPECT_NEAR(traj.states(100, 0), x, 1e-12);
  EXPECT_THROW(rollout_euler(inst, ControlGrid::zeros(7, 1)), DimensionError);
  EXPECT_NO_THROW(rollout_euler(inst, ControlGrid::zeros(101, 1)));
}

TEST(Rollout, QuaternionStaysUnitNorm) {
  const auto inst = make_instance(EnvId::Quadrotor);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  Eigen::MatrixXd v(99, 4);
  for (int i = 0; i < v.size(); ++i) v.data()[i] = n(rng);
  const auto traj = rollout_euler(inst, ControlGrid{v});
  for (int k = 0; k < inst.n_grid; ++k) {
    EXPECT_NEAR(traj.quaternions->row(k).norm(), 1.0, 1e-12);
  }
}

TEST(Rollout, DivergenceCarriesStep) {
  const auto inst = linear_instance(1e200, 0.0, 1.0, 0.0, 1.0, 0.1, 1.0, 11);
  try {
    rollout_euler(inst, ControlGrid::zeros(10, 1));
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.step(), 2);
  }
}

TEST(Cost, ZeroAtGoalEquilibrium) {
  auto inst = make_instance(EnvId::Pendulum);
  inst.cost.x_goal = Eigen::Vector2d::Zero();
  EXPECT_EQ(eval_total_cost(inst, ControlGrid::zeros(99, 1)), 0.0);
}

TEST(Cost, StaticSystemControlEnergy) {
  const auto inst = linear_instance(0.0, 0.0, 0.5, 0.5, 1.0, 0.1, 1.0, 101);
  const ControlGrid u{Eigen::MatrixXd::Constant(100, 1, 2.0)};
  EXPECT_NEAR(eval_total_cost(inst, u), 0.4, 1e-14);
}

TEST(Cost, PendulumMatchesScriptedQuadrature) {
  const auto inst = make_instance(EnvId::Pendulum);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  Eigen::MatrixXd v(99, 1);
  for (int i = 0; i < 99; ++i) v(i, 0) = d(rng);
  const double dt = 1.0 / 99.0;
  double th = 0.0, om = 0.0, j = 0.0;
  for (int k = 0; k < 99; ++k) {
    const double u = v(k, 0);
    j += dt * (10.0 * (th - kPi) * (th - kPi) + 1.0 * om * om + 0.1 * u * u);
    const double dom = (u - 10.0 * std::sin(th)) * 3.0;
    th += dt * om;
    om += dt * dom;
  }
  EXPECT_NEAR(eval_total_cost(inst, ControlGrid{v}), j, 1e-12 * std::abs(j));
}

TEST(Cost, NonNegativeOnRandomControls) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  for (EnvId id : synthetic_envs()) {
    const auto inst = make_instance(id);
    Eigen::MatrixXd v(inst.n_intervals(), inst.env.d_u);
    for (int i = 0; i < v.size(); ++i) v.data()[i] = n(rng);
    EXPECT_GE(eval_total_cost(inst, ControlGrid{v}), 0.0) << to_string(id);
  }
}

TEST(Cost, GridRefinementConverges) {
  // Smooth control u(t) = sin(3t) sampled on each grid; differences shrink with dt.
  auto cost_at = [](int n_grid) {
    auto inst = make_instance(EnvId::Pendulum);
    inst.n_grid = n_grid;
    Eigen::MatrixXd v(n_grid - 1, 1);
    for (int k = 0; k < n_grid - 1; ++k) v(k, 0) = std::sin(3.0 * k * inst.dt());
    return eval_total_cost(inst, ControlGrid{v});
  };
  const double d1 = std::abs(cost_at(51) - cost_at(101));
  const double d2 = std::abs(cost_at(101) - cost_at(201));
  const double d3 = std::abs(cost_at(201) - cost_at(401));
  EXPECT_LT(d2, d1);
  EXPECT_LT(d3, d2);
  EXPECT_NEAR(d2 / d1, 0.5, 0.1);
}

TEST(Brachistochrone, StraightLineHasClosedFormTime) {
  // Straight incline from rest: T = 2 L / v_end.
  const int n = 101;
  const double y1 = 3.0, y2 = 1.0, span = 2.0, g = 10.0;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = y1 + (y2 - y1) * i / (n - 1.0);
  const double len = std::hypot(span, y1 - y2);
  const double expected = 2.0 * len / std::sqrt(2.0 * g * (y1 - y2));
  EXPECT_NEAR(brachistochrone_time(y, y1, span / (n - 1), g), expected, 1e-12);
  // T scales like 1/sqrt(g).
  EXPECT_NEAR(brachistochrone_time(y, y1, span / (n - 1), 4.0 * g), expected / 2.0, 1e-12);
}

TEST(Brachistochrone, RejectsCurveAboveStart) {
  std::vector<double> y = {2.0, 2.5, 1.0};
  EXPECT_THROW(brachistochrone_time(y, 2.0, 0.5, 10.0), DomainError);
}
