#include "ncolab/solvers/lbfgs.hpp"

#include <ceres/ceres.h>

namespace ncolab::solvers {

namespace {

class Adapter : public ceres::FirstOrderFunction {
 public:
  Adapter(const GradFn& f, int n) : f_(f), n_(n), x_(n), g_(n) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    x_ = Eigen::Map<const Eigen::VectorXd>(parameters, n_);
    if (!f_(x_, cost, gradient ? &g_ : nullptr)) return false;
    if (gradient) Eigen::Map<Eigen::VectorXd>(gradient, n_) = g_;
    return true;
  }

  int NumParameters() const override { return n_; }

 private:
  const GradFn& f_;
  int n_;
  mutable Eigen::VectorXd x_;
  mutable Eigen::VectorXd g_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const GradFn& f, Eigen::VectorXd& x, int max_iters, double grad_tol) {
  LbfgsResult result;
  if (max_iters <= 0) return result;
  ceres::GradientProblem problem(new Adapter(f, static_cast<int>(x.size())));
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = max_iters;
  options.gradient_tolerance = grad_tol;
  options.function_tolerance = 0.0;
  options.parameter_tolerance = 0.0;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, x.data(), &summary);
  result.iterations = static_cast<int>(summary.iterations.size());
  result.converged = summary.termination_type == ceres::CONVERGENCE;
  return result;
}

}  // namespace ncolab::solvers
