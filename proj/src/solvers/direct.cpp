#include "ncolab/solvers/direct.hpp"

#include <random>

#include "ncolab/core/adam.hpp"
#include "ncolab/core/error.hpp"
#include "ncolab/core/util.hpp"
#include "ncolab/solvers/lbfgs.hpp"
#include "ncolab/solvers/objective.hpp"

namespace ncolab::solvers {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::VectorXd initial_knots(const envs::OcpInstance& inst, const DirectSolverConfig& cfg,
                              int n_knots) {
  const int n = n_knots * inst.env.d_u;
  if (inst.env.id == envs::EnvId::Brachistochrone) {
    return Eigen::VectorXd::LinSpaced(n, inst.x_init[0], inst.cost.x_goal[0]);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (cfg.u_init == ControlInit::SmallUniform) {
    auto rng = core::make_stream(cfg.seed, "u-init");
    std::uniform_real_distribution<double> d(-0.1, 0.1);
    for (int i = 0; i < n; ++i) x[i] = d(rng);
  }
  return x;
}

}  // namespace

std::string to_string(ControlInit init) {
  return init == ControlInit::Zeros ? "zeros" : "small-uniform";
}

ControlInit control_init_from_string(const std::string& s) {
  if (s == "zeros") return ControlInit::Zeros;
  if (s == "small-uniform") return ControlInit::SmallUniform;
  throw ConfigError("unknown control initialization '" + s + "'");
}

void DirectSolverConfig::validate() const {
  if (n_knots < 1) throw ConfigError("n_knots must be at least 1");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
  if (!(lr0 > 0.0) || !(decay > 0.0) || decay_period < 1) {
    throw ConfigError("learning-rate schedule must be positive");
  }
  if (polish_iters < 0) throw ConfigError("polish_iters must be non-negative");
}

nlohmann::json DirectSolverConfig::to_json() const {
  return {{"n_knots", n_knots},   {"max_iters", max_iters},         {"lr0", lr0},
          {"decay", decay},       {"decay_period", decay_period},   {"grad_tol", grad_tol},
          {"u_init", to_string(u_init)}, {"seed", seed},            {"polish_iters", polish_iters}};
}

DirectSolverConfig direct_config_from_json(const nlohmann::json& j) {
  DirectSolverConfig c;
  c.n_knots = j.value("n_knots", c.n_knots);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.lr0 = j.value("lr0", c.lr0);
  c.decay = j.value("decay", c.decay);
  c.decay_period = j.value("decay_period", c.decay_period);
  c.grad_tol = j.value("grad_tol", c.grad_tol);
  c.u_init = control_init_from_string(j.value("u_init", to_string(c.u_init)));
  c.seed = j.value("seed", c.seed);
  c.polish_iters = j.value("polish_iters", c.polish_iters);
  c.validate();
  return c;
}

int effective_knots(const envs::OcpInstance& inst, const DirectSolverConfig& cfg) {
  if (inst.env.id == envs::EnvId::Brachistochrone) return inst.n_grid;
  const int intervals = inst.n_intervals();
  if (cfg.n_knots == inst.n_grid || intervals % cfg.n_knots == 0) return cfg.n_knots;
  return inst.n_grid;
}

Solution solve_direct(const envs::OcpInstance& inst, const DirectSolverConfig& cfg) {
  const double t0 = core::now_seconds();
  cfg.validate();
  inst.validate();
  const int n_knots = effective_knots(inst, cfg);
  Objective obj(inst, n_knots);

  Eigen::VectorXd x = initial_knots(inst, cfg, n_knots);
  obj.apply_pins(x);
  Eigen::VectorXd g;
  double j = obj.evaluate(as_span(x), &g);
  Eigen::VectorXd best_x = x;
  double best_j = j;
  double best_g = g.lpNorm<Eigen::Infinity>();

  auto adam = core::AdamState::for_size(x.size(), cfg.lr0, cfg.decay, cfg.decay_period);
  int iters = 0;
  bool diverged = false;
  for (int it = 0; it < cfg.max_iters && best_g >= cfg.grad_tol; ++it) {
    adam.apply(x, g, it, &obj.pinned());
    ++iters;
    try {
      j = obj.evaluate(as_span(x), &g);
    } catch (const NumericalError&) {
      diverged = true;
      break;
    } catch (const DomainError&) {
      diverged = true;
      break;
    }
    if (j < best_j) {
      best_j = j;
      best_x = x;
      best_g = g.lpNorm<Eigen::Infinity>();
    }
  }

  if (!diverged && best_g >= cfg.grad_tol && cfg.polish_iters > 0) {
    GradFn f = [&obj](const Eigen::VectorXd& p, double* value, Eigen::VectorXd* grad) {
      try {
        *value = obj.evaluate(as_span(p), grad);
        return true;
      } catch (const NumericalError&) {
        return false;
      } catch (const DomainError&) {
        return false;
      }
    };
    Eigen::VectorXd p = best_x;
    const auto res = minimize_lbfgs(f, p, cfg.polish_iters, cfg.grad_tol);
    iters += res.iterations;
    try {
      const double jp = obj.evaluate(as_span(p), &g);
      if (jp <= best_j) {
        best_j = jp;
        best_x = p;
        best_g = g.lpNorm<Eigen::Infinity>();
      }
    } catch (const Error&) {
      // keep the Adam iterate
    }
  }

  Solution sol;
  sol.u_star = unflatten(best_x, n_knots, inst.env.d_u);
  if (n_knots == inst.n_grid && inst.env.id != envs::EnvId::Brachistochrone && n_knots > 1) {
    sol.u_star.values.row(n_knots - 1) = sol.u_star.values.row(n_knots - 2);
  }
  sol.J = best_j;
  sol.grad_inf = best_g;
  sol.iters_used = iters;
  sol.converged = !diverged && best_g < cfg.grad_tol;
  sol.wall_time_seconds = core::now_seconds() - t0;
  return sol;
}

nlohmann::json solution_to_json(const envs::OcpInstance& inst, const Solution& sol) {
  nlohmann::json u = nlohmann::json::array();
  for (Eigen::Index r = 0; r < sol.u_star.values.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(sol.u_star.values.cols()));
    for (Eigen::Index c = 0; c < sol.u_star.values.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = sol.u_star.values(r, c);
    }
    u.push_back(row);
  }
  return {{"instance", envs::instance_to_json(inst)},
          {"u_star", u},
          {"J", sol.J},
          {"grad_inf", sol.grad_inf},
          {"iters", sol.iters_used},
          {"wall_time", sol.wall_time_seconds},
          {"converged", sol.converged}};
}

}  // namespace ncolab::solvers
