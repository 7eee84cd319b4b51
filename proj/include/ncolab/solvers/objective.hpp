#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ncolab/core/tape.hpp"
#include "ncolab/envs/env.hpp"

namespace ncolab::solvers {

/// Discrete objective J(u) of one instance as a function of its control
/// knots (row-major n_knots x d_u), with its reverse-mode gradient.
///
/// The rollout is recorded on a tape once; later evaluations overwrite the
/// inputs and replay it, so every call is the exact derivative of the Euler
/// recursion (the discrete adjoint). For Brachistochrone the knots are the
/// curve heights on the grid and the two endpoint knots are pinned.
class Objective {
 public:
  Objective(const envs::OcpInstance& inst, int n_knots);
  Objective(const Objective&) = delete;
  Objective& operator=(const Objective&) = delete;

  int size() const { return n_knots_ * d_u_; }
  int n_knots() const { return n_knots_; }
  int d_u() const { return d_u_; }

  /// Entries the optimizer must leave untouched (Brachistochrone endpoints).
  const std::vector<bool>& pinned() const { return pinned_; }

  /// Writes the pinned values into knots.
  void apply_pins(Eigen::VectorXd& knots) const;

  /// J at knots; fills grad (size()) when non-null. Throws NumericalError
  /// (DivergenceError for blow-ups) when J or the gradient is not finite,
  /// DomainError when a Brachistochrone curve rises to the start height.
  double evaluate(std::span<const double> knots, Eigen::VectorXd* grad);

 private:
  void record(std::span<const double> knots);

  envs::OcpInstance inst_;
  int n_knots_;
  int d_u_;
  std::vector<bool> pinned_;
  core::Tape tape_;
  std::vector<core::Var> inputs_;
  core::Var output_{};
  bool recorded_ = false;
};

/// Gradient of eval_total_cost with respect to every knot (n_knots x d_u).
Eigen::MatrixXd adjoint_gradient(const envs::OcpInstance& inst, const envs::ControlGrid& u);

Eigen::VectorXd flatten(const envs::ControlGrid& u);
envs::ControlGrid unflatten(const Eigen::VectorXd& knots, int n_knots, int d_u);

}  // namespace ncolab::solvers
