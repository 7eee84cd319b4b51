#include "ncolab/solvers/zermelo.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ncolab/core/adam.hpp"
#include "ncolab/core/error.hpp"
#include "ncolab/core/tape.hpp"
#include "ncolab/core/util.hpp"
#include "ncolab/envs/dynamics.hpp"
#include "ncolab/solvers/lbfgs.hpp"

namespace ncolab::solvers {

namespace {

using core::Tape;
using core::Var;

/// Penalized objective over [beta_0 .. beta_{K-1}, r] with horizon T = r^2,
/// which keeps T positive without bounds.
class ZermeloObjective {
 public:
  ZermeloObjective(const envs::OcpInstance& inst, double rho) : inst_(inst), rho_value_(rho) {}
  ZermeloObjective(const ZermeloObjective&) = delete;
  ZermeloObjective& operator=(const ZermeloObjective&) = delete;

  void set_rho(double rho) { tape_.set_input(rho_, rho); }

  double evaluate(const Eigen::VectorXd& p, Eigen::VectorXd* grad) {
    if (!recorded_) {
      record(p);
    } else {
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        tape_.set_input(inputs_[static_cast<std::size_t>(i)], p[i]);
      }
      tape_.replay();
    }
    const double v = out_.value();
    if (!std::isfinite(v)) throw NumericalError("zermelo objective is not finite");
    if (grad) {
      tape_.backward(out_);
      grad->resize(p.size());
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        (*grad)[i] = tape_.adjoint(inputs_[static_cast<std::size_t>(i)]);
      }
      if (!grad->allFinite()) throw NumericalError("zermelo gradient is not finite");
    }
    return v;
  }

  void record(const Eigen::VectorXd& p) {
    tape_.clear();
    inputs_.clear();
    for (Eigen::Index i = 0; i < p.size(); ++i) inputs_.push_back(tape_.input(p[i]));
    rho_ = tape_.input(rho_value_);
    const std::size_t n_beta = inputs_.size() - 1;
    std::vector<Var> z = {tape_.constant(inst_.x_init[0]), tape_.constant(inst_.x_init[1])};
    const Var t = square(inputs_.back());
    const Var dt = t / static_cast<double>(n_beta);
    std::vector<Var> scratch;
    for (std::size_t k = 0; k < n_beta; ++k) {
      envs::euler_step<Var, Var>(inst_.env, z, std::span<const Var>(&inputs_[k], 1), dt, scratch);
    }
    const Var ex = z[0] - inst_.cost.x_goal[0];
    const Var ey = z[1] - inst_.cost.x_goal[1];
    out_ = t + rho_ * (ex * ex + ey * ey);
    recorded_ = true;
  }

 private:
  envs::OcpInstance inst_;
  double rho_value_;
  Tape tape_;
  std::vector<Var> inputs_;
  Var rho_{};
  Var out_{};
  bool recorded_ = false;
};

}  // namespace

Eigen::Vector2d zermelo_endpoint(const envs::OcpInstance& inst, const Eigen::VectorXd& beta,
                                 double T) {
  std::vector<double> z = {inst.x_init[0], inst.x_init[1]};
  std::vector<double> scratch;
  const double dt = T / static_cast<double>(beta.size());
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    envs::euler_step<double, double>(inst.env, z, std::span<const double>(&beta[k], 1), dt,
                                     scratch);
  }
  return {z[0], z[1]};
}

ZermeloSolution zermelo_solve(const envs::OcpInstance& inst, const ZermeloConfig& cfg) {
  const double t0 = core::now_seconds();
  inst.validate();
  if (inst.env.id != envs::EnvId::Zermelo) throw ConfigError("zermelo_solve needs a zermelo instance");
  const double v = inst.env.constant("V");
  const int n_beta = inst.n_intervals();
  const Eigen::Vector2d start = inst.x_init;
  const Eigen::Vector2d target = inst.cost.x_goal;
  const double dist = (target - start).norm();

  // Decision vector [beta_0 .. beta_{K-1}, r] with T = r^2.
  Eigen::VectorXd p(n_beta + 1);
  p.head(n_beta).setConstant(std::atan2(target[1] - start[1], target[0] - start[0]));
  p[n_beta] = std::sqrt(std::max(dist / v, 1e-3));

  ZermeloObjective obj(inst, cfg.rho0);
  obj.record(p);
  double rho = cfg.rho0;
  int iters = 0;
  double miss = 0.0;
  auto f = [&obj](const Eigen::VectorXd& x, double* value, Eigen::VectorXd* grad) {
    try {
      *value = obj.evaluate(x, grad);
      return true;
    } catch (const NumericalError&) {
      return false;
    }
  };

  for (int round = 0; round < cfg.max_rounds; ++round) {
    obj.set_rho(rho);
    if (round == 0) {
      auto adam = core::AdamState::for_size(p.size(), cfg.lr0, 0.9, 500);
      Eigen::VectorXd g;
      Eigen::VectorXd best = p;
      double best_v = obj.evaluate(p, &g);
      for (int it = 0; it < cfg.adam_iters; ++it) {
        adam.apply(p, g, it);
        ++iters;
        double val = 0.0;
        if (!f(p, &val, &g)) break;
        if (val < best_v) {
          best_v = val;
          best = p;
        }
      }
      p = best;
    }
    iters += minimize_lbfgs(f, p, cfg.polish_iters, cfg.grad_tol).iterations;
    miss = (zermelo_endpoint(inst, p.head(n_beta), p[n_beta] * p[n_beta]) - target).norm();
    if (miss < cfg.target_miss) break;
    rho *= 2.0;
  }

  ZermeloSolution sol;
  sol.beta = envs::ControlGrid{Eigen::MatrixXd(p.head(n_beta))};
  sol.T = p[n_beta] * p[n_beta];
  sol.miss = miss;
  sol.rho = rho;
  sol.iters_used = iters;
  sol.wall_time_seconds = core::now_seconds() - t0;
  if (!(miss <= cfg.max_miss)) {
    throw NumericalError("zermelo: terminal miss " + std::to_string(miss) +
                         " above tolerance (infeasible or unconverged)");
  }
  return sol;
}

double zermelo_formula_residual(const Eigen::VectorXd& beta, double dt, double a, double b,
                                double c, double d) {
  if (beta.size() < 3) return 0.0;
  if (!(dt > 0.0)) throw DomainError("residual needs a positive sample spacing");
  double sum = 0.0;
  const Eigen::Index n = beta.size();
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const double rate = (beta[k + 1] - beta[k - 1]) / (2.0 * dt);
    const double s = std::sin(beta[k]);
    const double co = std::cos(beta[k]);
    const double formula = s * s * c + s * co * (a - d) - co * co * b;
    sum += (rate - formula) * (rate - formula);
  }
  return std::sqrt(sum / static_cast<double>(n - 2));
}

}  // namespace ncolab::solvers
