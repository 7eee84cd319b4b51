#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ncolab::solvers {

/// Cycloid x = x1 + k (theta - sin theta), y = y1 - k (1 - cos theta),
/// theta in [0, Theta], through both endpoints.
struct CycloidSolution {
  double k = 0.0;
  double Theta = 0.0;
  double T = 0.0;
  Eigen::VectorXd x;  // uniform grid on [x1, x2]
  Eigen::VectorXd y;  // cycloid height at x
};

/// Theta from bisection on (Theta - sin Theta) / (1 - cos Theta) = (x2 - x1) / (y1 - y2),
/// then k = (y1 - y2) / (1 - cos Theta) and T = Theta sqrt(k / g).
/// Throws DomainError unless y1 > y2 and x2 > x1.
CycloidSolution brachistochrone_analytic(double y1, double x1, double x2, double y2, double g,
                                         int n_points = 101);

}  // namespace ncolab::solvers
