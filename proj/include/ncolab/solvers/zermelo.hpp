#pragma once

#include <Eigen/Dense>

#include "ncolab/envs/env.hpp"

namespace ncolab::solvers {

/// Free-final-time direct transcription: heading knots beta_k and the
/// horizon T minimize T + rho |(x(T), y(T)) - target|^2 on the Euler grid.
/// rho starts at rho0 and doubles whenever a round stalls above
/// target_miss, for at most max_rounds rounds.
struct ZermeloConfig {
  double rho0 = 1e3;
  int max_rounds = 12;
  int adam_iters = 2000;
  double lr0 = 0.02;
  int polish_iters = 3000;
  double grad_tol = 1e-9;
  double target_miss = 2e-4;
  double max_miss = 1e-3;
};

struct ZermeloSolution {
  envs::ControlGrid beta;  // one heading per Euler interval
  double T = 0.0;
  double miss = 0.0;       // distance of the end point from the target
  double rho = 0.0;        // final penalty weight
  int iters_used = 0;
  double wall_time_seconds = 0.0;
};

/// Instance layout: x_init = start (x1, y1), cost.x_goal = target (x2, y2),
/// constants V A B C D. Throws NumericalError when the final miss exceeds
/// cfg.max_miss (infeasible or unconverged).
ZermeloSolution zermelo_solve(const envs::OcpInstance& inst, const ZermeloConfig& cfg = {});

/// End point of the Euler rollout of headings beta over horizon T.
Eigen::Vector2d zermelo_endpoint(const envs::OcpInstance& inst, const Eigen::VectorXd& beta,
                                 double T);

/// RMS over interior samples of
///   dbeta/dt - [sin^2 b C + sin b cos b (A - D) - cos^2 b B],
/// with dbeta/dt from central differences of samples spaced dt apart.
double zermelo_formula_residual(const Eigen::VectorXd& beta, double dt, double a, double b,
                                double c, double d);

}  // namespace ncolab::solvers
