#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ncolab::solvers {

/// f(x, grad) -> value; returns false when x is outside the domain or the
/// value is not finite.
using GradFn = std::function<bool(const Eigen::VectorXd& x, double* value, Eigen::VectorXd* grad)>;

struct LbfgsResult {
  int iterations = 0;
  bool converged = false;  // gradient tolerance met
};

/// Quasi-Newton minimization (L-BFGS with a Wolfe line search) starting at x,
/// which holds the final iterate on return. Terminates when
/// max|grad| < grad_tol or after max_iters iterations.
LbfgsResult minimize_lbfgs(const GradFn& f, Eigen::VectorXd& x, int max_iters, double grad_tol);

}  // namespace ncolab::solvers
