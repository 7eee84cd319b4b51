#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ncolab/core/finite_diff.hpp"
#include "ncolab/envs/brachistochrone.hpp"
#include "ncolab/envs/rollout.hpp"
#include "ncolab/solvers/brachistochrone.hpp"
#include "ncolab/solvers/direct.hpp"
#include "ncolab/solvers/objective.hpp"
#include "ncolab/solvers/zermelo.hpp"

using namespace ncolab;
using namespace ncolab::envs;
using namespace ncolab::solvers;

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

OcpInstance brachistochrone_instance(double y1, double y2) {
  auto inst = make_instance(EnvId::Brachistochrone);
  inst.x_init << y1;
  inst.cost.x_goal << y2;
  return inst;
}

double cost_of(const OcpInstance& inst, const Eigen::VectorXd& knots, int n_knots) {
  return eval_total_cost(inst, unflatten(knots, n_knots, inst.env.d_u));
}

}  // namespace

class AdjointGradient : public ::testing::TestWithParam<std::tuple<EnvId, int>> {};

TEST_P(AdjointGradient, MatchesFiniteDifferences) {
  const auto [id, seed] = GetParam();
  auto inst = make_instance(id);
  inst.n_grid = 101;
  const int n_knots = 20;
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd knots(n_knots * inst.env.d_u);
  for (Eigen::Index i = 0; i < knots.size(); ++i) knots[i] = n(rng);
  const Eigen::MatrixXd g = adjoint_gradient(inst, unflatten(knots, n_knots, inst.env.d_u));
  const Eigen::VectorXd fd = core::finite_diff_grad(
      [&](std::span<const double> p) {
        return cost_of(inst, Eigen::Map<const Eigen::VectorXd>(p.data(), knots.size()), n_knots);
      },
      std::span<const double>(knots.data(), static_cast<std::size_t>(knots.size())));
  const Eigen::VectorXd flat = flatten(ControlGrid{g});
  EXPECT_LT(core::relative_error(flat, fd), 1e-5) << to_string(id) << " seed " << seed;
}

INSTANTIATE_TEST_SUITE_P(Synthetic, AdjointGradient,
                         ::testing::Combine(::testing::Values(EnvId::Pendulum, EnvId::RobotArm,
                                                              EnvId::CartPole, EnvId::Quadrotor,
                                                              EnvId::Rocket),
                                            ::testing::Range(0, 10)));

TEST(AdjointGradient, StaticSystemIsDecoupledQuadratic) {
  const auto inst = linear_instance(0.0, 0.0, 0.3, 0.3, 1.0, 0.1, 1.0, 51);
  Eigen::MatrixXd v(50, 1);
  for (int k = 0; k < 50; ++k) v(k, 0) = std::sin(k);
  const Eigen::MatrixXd g = adjoint_gradient(inst, ControlGrid{v});
  const double dt = inst.dt();
  for (int k = 0; k < 50; ++k) EXPECT_NEAR(g(k, 0), 2.0 * 0.1 * dt * v(k, 0), 1e-15);
}

TEST(AdjointGradient, VanishesAtLqStationaryPoint) {
  // The LQ objective is quadratic in the knots, so its gradient is affine:
  // recover H and b from exact gradients and solve H u = -b.
  const auto inst = linear_instance(0.5, 1.0, 1.0, 0.0, 1.0, 0.1, 1.0, 41);
  const int n = 40;
  Eigen::MatrixXd h(n, n);
  const Eigen::VectorXd b = flatten(ControlGrid{adjoint_gradient(inst, ControlGrid::zeros(n, 1))});
  for (int j = 0; j < n; ++j) {
    ControlGrid e = ControlGrid::zeros(n, 1);
    e.values(j, 0) = 1.0;
    h.col(j) = flatten(ControlGrid{adjoint_gradient(inst, e)}) - b;
  }
  const Eigen::VectorXd u = h.ldlt().solve(-b);
  const Eigen::MatrixXd g = adjoint_gradient(inst, unflatten(u, n, 1));
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AdjointGradient, BrachistochroneMatchesFiniteDifferences) {
  const auto inst = brachistochrone_instance(2.7, 1.3);
  const auto cyc = brachistochrone_analytic(2.7, 0.0, 2.0, 1.3, 10.0);
  // Perturb the optimum so the gradient is not near zero.
  Eigen::VectorXd y = cyc.y;
  for (Eigen::Index i = 1; i + 1 < y.size(); ++i) y[i] += 0.05 * std::sin(0.3 * i);
  const Eigen::MatrixXd g = adjoint_gradient(inst, ControlGrid{y});
  const Eigen::VectorXd fd = core::finite_diff_grad(
      [&](std::span<const double> p) {
        return cost_of(inst, Eigen::Map<const Eigen::VectorXd>(p.data(), y.size()), 101);
      },
      std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
  Eigen::VectorXd fd_free = fd;
  fd_free[0] = 0.0;
  fd_free[100] = 0.0;
  EXPECT_LT(core::relative_error(g.col(0), fd_free), 1e-5);
}

TEST(SolveDirect, StaticSystemConvergesToZero) {
  const auto inst = linear_instance(0.0, 0.0, 0.5, 0.5, 1.0, 0.1, 1.0, 101);
  DirectSolverConfig cfg;
  cfg.u_init = ControlInit::SmallUniform;
  cfg.seed = 3;
  const auto sol = solve_direct(inst, cfg);
  EXPECT_TRUE(sol.converged);
  EXPECT_LT(sol.J, 1e-10);
  EXPECT_LT(sol.u_star.values.cwiseAbs().maxCoeff(), 1e-4);
}

TEST(SolveDirect, LqBeatsBestConstantControlWithinOnePercent) {
  const auto inst = linear_instance(0.0, 1.0, 1.0, 0.0, 1.0, 0.1, 0.1, 101);
  double best_const = std::numeric_limits<double>::infinity();
  for (int i = -10000; i <= 10000; ++i) {
    const double u = i * 1e-3;
    best_const = std::min(best_const, eval_total_cost(inst, ControlGrid{Eigen::MatrixXd::Constant(100, 1, u)}));
  }
  const auto sol = solve_direct(inst, {});
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(sol.J, best_const + 1e-12);
  EXPECT_LT(std::abs(sol.J - best_const) / best_const, 1e-2);
}

TEST(SolveDirect, ReturnsNoWorseThanInitialAndIsDeterministic) {
  for (EnvId id : synthetic_envs()) {
    const auto inst = make_instance(id);
    DirectSolverConfig cfg;
    cfg.max_iters = 200;
    cfg.polish_iters = 50;
    cfg.u_init = ControlInit::SmallUniform;
    cfg.seed = 11;
    const auto a = solve_direct(inst, cfg);
    const auto b = solve_direct(inst, cfg);
    EXPECT_EQ(a.u_star.values, b.u_star.values) << to_string(id);
    EXPECT_EQ(a.J, b.J);
    EXPECT_EQ(a.iters_used, b.iters_used);
    // Initial control of the same config, evaluated independently.
    auto init_cfg = cfg;
    init_cfg.max_iters = 1;
    init_cfg.polish_iters = 0;
    init_cfg.grad_tol = 1e300;
    const auto init = solve_direct(inst, init_cfg);
    EXPECT_EQ(init.iters_used, 0);
    EXPECT_LE(a.J, init.J) << to_string(id);
  }
}

TEST(SolveDirect, SolutionJsonHasFields) {
  const auto inst = make_instance(EnvId::RobotArm);
  const auto sol = solve_direct(inst, {});
  const auto j = solution_to_json(inst, sol);
  EXPECT_EQ(j.at("u_star").size(), 100u);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_NEAR(j.at("J").get<double>(), eval_total_cost(inst, sol.u_star), 1e-12);
}

TEST(SolveDirect, BrachistochroneWithinOnePercentOfCycloid) {
  for (const auto& [y1, y2] : std::vector<std::pair<double, double>>{{2.5, 1.5}, {3.0, 1.0}, {2.2, 1.9}}) {
    const auto inst = brachistochrone_instance(y1, y2);
    const auto sol = solve_direct(inst, {});
    const auto cyc = brachistochrone_analytic(y1, 0.0, 2.0, y2, 10.0);
    EXPECT_LT(std::abs(sol.J - cyc.T) / cyc.T, 1e-2);
    EXPECT_EQ(sol.u_star.values(0, 0), y1);
    EXPECT_EQ(sol.u_star.values(100, 0), y2);
  }
}

TEST(Cycloid, HalfCycleExample) {
  const auto c = brachistochrone_analytic(2.0, 0.0, kPi, 0.0, 10.0);
  EXPECT_NEAR(c.k, 1.0, 1e-12);
  EXPECT_NEAR(c.Theta, kPi, 1e-12);
  EXPECT_NEAR(c.T, kPi / std::sqrt(10.0), 1e-9);
}

TEST(Cycloid, NearVerticalApproachesFreeFall) {
  const double drop = 2.0;
  const auto c = brachistochrone_analytic(3.0, 0.0, 1e-6, 1.0, 10.0);
  EXPECT_LT(c.Theta, 1e-5);
  EXPECT_NEAR(c.T, std::sqrt(2.0 * drop / 10.0), 1e-5);
}

TEST(Cycloid, EndpointsAndParametricConsistency) {
  const auto c = brachistochrone_analytic(2.6, 0.0, 2.0, 1.4, 10.0);
  EXPECT_NEAR(c.x[0], 0.0, 1e-10);
  EXPECT_NEAR(c.y[0], 2.6, 1e-10);
  EXPECT_NEAR(c.x[100], 2.0, 1e-10);
  EXPECT_NEAR(c.y[100], 1.4, 1e-10);
  // Boundary residual of the parametric form at Theta.
  EXPECT_NEAR(c.k * (c.Theta - std::sin(c.Theta)), 2.0, 1e-10);
  EXPECT_NEAR(2.6 - c.k * (1.0 - std::cos(c.Theta)), 1.4, 1e-10);
}

TEST(Cycloid, RejectsAscendingEndpoints) {
  EXPECT_THROW(brachistochrone_analytic(1.0, 0.0, 2.0, 1.5, 10.0), DomainError);
  EXPECT_THROW(brachistochrone_analytic(2.0, 1.0, 1.0, 1.5, 10.0), DomainError);
}

TEST(Cycloid, TravelTimeOfSampledCurveWithinOnePercent) {
  const auto c = brachistochrone_analytic(2.5, 0.0, 2.0, 1.5, 10.0);
  const double t = brachistochrone_time(std::vector<double>(c.y.data(), c.y.data() + 101), 2.5, 0.02, 10.0);
  EXPECT_LT(std::abs(t - c.T) / c.T, 1e-2);
  EXPECT_GT(t, c.T);  // polyline through points of the optimum is slower
}

TEST(Cycloid, BeatsStraightLineOnRandomEndpoints) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d1(2.0, 3.8);
  std::uniform_real_distribution<double> d2(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double y1 = d1(rng);
    const double y2 = y1 - 0.05 - d2(rng) * 1.5;
    const auto c = brachistochrone_analytic(y1, 0.0, 2.0, y2, 10.0);
    EXPECT_NEAR(c.y[100], y2, 1e-10);
    EXPECT_NEAR(c.k * (c.Theta - std::sin(c.Theta)), 2.0, 1e-10);
    std::vector<double> line(101);
    for (int i = 0; i <= 100; ++i) line[i] = y1 + (y2 - y1) * i / 100.0;
    EXPECT_LT(c.T, brachistochrone_time(line, y1, 0.02, 10.0));
  }
}

TEST(Zermelo, ZeroCurrentsStraightLine) {
  const auto inst = make_instance(EnvId::Zermelo);  // target (1, 1), V = 2
  const auto sol = zermelo_solve(inst);
  EXPECT_NEAR(sol.T, std::sqrt(2.0) / 2.0, 0.005 * std::sqrt(2.0) / 2.0);
  EXPECT_LT(sol.miss, 1e-3);
  EXPECT_LT((sol.beta.values.array() - kPi / 4.0).abs().maxCoeff(), 1e-4);
}

TEST(Zermelo, TargetOnAxis) {
  auto inst = make_instance(EnvId::Zermelo);
  inst.cost.x_goal << 1.5, 0.0;
  const auto sol = zermelo_solve(inst);
  EXPECT_NEAR(sol.T, 1.5 / 2.0, 0.005 * 0.75);
}

TEST(Zermelo, ResidualExamples) {
  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(20, 0.7);
  EXPECT_EQ(zermelo_formula_residual(constant, 0.01, 0.0, 0.0, 0.0, 0.0), 0.0);
  // beta = C t sampled so the middle sample sits at beta = 0.
  const double c = 0.8, dt = 0.01;
  const Eigen::Vector3d beta(-c * dt, 0.0, c * dt);
  EXPECT_NEAR(zermelo_formula_residual(beta, dt, 0.0, 0.0, c, 0.0), std::abs(c), 1e-12);
}

TEST(Zermelo, LinearCurrentsSatisfyNavigationFormula) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    auto inst = make_instance(EnvId::Zermelo);
    inst.cost.x_goal << 1.0 + u(rng), 1.0 + u(rng);
    inst.env.constants << 2.0 + u(rng), u(rng), u(rng), u(rng), u(rng);
    const auto sol = zermelo_solve(inst);
    const auto& k = inst.env.constants;
    const double r = zermelo_formula_residual(sol.beta.values.col(0), sol.T / sol.beta.n_knots(),
                                              k[1], k[2], k[3], k[4]);
    EXPECT_LT(r, 1e-2);
    EXPECT_LT(sol.miss, 1e-3);
    EXPECT_LT((zermelo_endpoint(inst, sol.beta.values.col(0), sol.T) - inst.cost.x_goal).norm(),
              1e-3);
  }
}

TEST(Zermelo, UnmetToleranceRaises) {
  ZermeloConfig cfg;
  cfg.max_rounds = 1;
  cfg.max_miss = 1e-12;
  EXPECT_THROW(zermelo_solve(make_instance(EnvId::Zermelo), cfg), NumericalError);
}
