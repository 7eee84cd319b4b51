#include "ncolab/solvers/objective.hpp"

#include <cmath>
#include <string>

#include "ncolab/core/error.hpp"
#include "ncolab/envs/brachistochrone.hpp"
#include "ncolab/envs/rollout.hpp"

namespace ncolab::solvers {

using core::Var;

Objective::Objective(const envs::OcpInstance& inst, int n_knots)
    : inst_(inst), n_knots_(n_knots), d_u_(inst.env.d_u) {
  inst_.validate();
  envs::check_knots(n_knots, inst_.n_grid);
  pinned_.assign(static_cast<std::size_t>(size()), false);
  if (inst_.env.id == envs::EnvId::Brachistochrone) {
    if (n_knots != inst_.n_grid) {
      throw DimensionError("brachistochrone curve needs one knot per grid point");
    }
    pinned_.front() = true;
    pinned_.back() = true;
  }
}

void Objective::apply_pins(Eigen::VectorXd& knots) const {
  if (inst_.env.id == envs::EnvId::Brachistochrone) {
    knots[0] = inst_.x_init[0];
    knots[knots.size() - 1] = inst_.cost.x_goal[0];
  }
}

void Objective::record(std::span<const double> knots) {
  tape_.clear();
  inputs_.clear();
  recorded_ = false;
  for (double v : knots) inputs_.push_back(tape_.input(v));
  if (inst_.env.id == envs::EnvId::Brachistochrone) {
    output_ = envs::brachistochrone_time_generic<Var>(inputs_, inst_.x_init[0], inst_.dt(),
                                                      inst_.env.constant("g"));
  } else {
    const Eigen::VectorXd z0 = envs::initial_state(inst_);
    std::vector<Var> z;
    z.reserve(static_cast<std::size_t>(z0.size()));
    for (Eigen::Index i = 0; i < z0.size(); ++i) z.push_back(tape_.constant(z0[i]));
    output_ = envs::total_cost_generic<Var, double>(inst_, std::move(z), inputs_, n_knots_,
                                                    inst_.dt());
  }
  recorded_ = true;
}

double Objective::evaluate(std::span<const double> knots, Eigen::VectorXd* grad) {
  if (knots.size() != static_cast<std::size_t>(size())) {
    throw DimensionError("objective expects " + std::to_string(size()) + " knot values, got " +
                         std::to_string(knots.size()));
  }
  std::vector<double> values(knots.begin(), knots.end());
  if (inst_.env.id == envs::EnvId::Brachistochrone) {
    values.front() = inst_.x_init[0];
    values.back() = inst_.cost.x_goal[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (!(values[i] < inst_.x_init[0])) {
        throw DomainError("curve point " + std::to_string(i) + " is not below the start height");
      }
    }
  }
  if (!recorded_) {
    record(values);
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) tape_.set_input(inputs_[i], values[i]);
    tape_.replay();
  }
  const double j = output_.value();
  if (!std::isfinite(j)) {
    throw DivergenceError("objective is not finite", -1);
  }
  if (grad) {
    tape_.backward(output_);
    grad->resize(size());
    for (int i = 0; i < size(); ++i) {
      (*grad)[i] = pinned_[static_cast<std::size_t>(i)] ? 0.0 : tape_.adjoint(inputs_[i]);
    }
    if (!grad->allFinite()) throw NumericalError("objective gradient is not finite");
  }
  return j;
}

Eigen::VectorXd flatten(const envs::ControlGrid& u) {
  Eigen::VectorXd out(u.values.size());
  for (Eigen::Index r = 0; r < u.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.values.cols(); ++c) out[r * u.values.cols() + c] = u.values(r, c);
  }
  return out;
}

envs::ControlGrid unflatten(const Eigen::VectorXd& knots, int n_knots, int d_u) {
  if (knots.size() != static_cast<Eigen::Index>(n_knots) * d_u) {
    throw DimensionError("cannot reshape " + std::to_string(knots.size()) + " values into " +
                         std::to_string(n_knots) + " x " + std::to_string(d_u));
  }
  envs::ControlGrid g{Eigen::MatrixXd(n_knots, d_u)};
  for (int r = 0; r < n_knots; ++r) {
    for (int c = 0; c < d_u; ++c) g.values(r, c) = knots[r * d_u + c];
  }
  return g;
}

Eigen::MatrixXd adjoint_gradient(const envs::OcpInstance& inst, const envs::ControlGrid& u) {
  u.validate();
  if (u.d_u() != inst.env.d_u) {
    throw DimensionError("control grid has " + std::to_string(u.d_u()) + " columns, expected " +
                         std::to_string(inst.env.d_u));
  }
  Objective obj(inst, u.n_knots());
  const Eigen::VectorXd knots = flatten(u);
  Eigen::VectorXd g;
  obj.evaluate(std::span<const double>(knots.data(), static_cast<std::size_t>(knots.size())), &g);
  return unflatten(g, u.n_knots(), u.d_u()).values;
}

}  // namespace ncolab::solvers
