#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ncolab/datagen/dataset.hpp"
#include "ncolab/operator/model.hpp"
#include "ncolab/solvers/direct.hpp"

namespace ncolab::train {

/// Relative error assigned to an instance whose predicted controls make the
/// rollout diverge.
inline constexpr double kDivergedError = 10.0;

using Policy = std::function<envs::ControlGrid(const envs::OcpInstance&)>;

struct InstanceResult {
  double J_opt = 0.0;
  double J_sol = 0.0;
  double rel_error = 0.0;
  bool diverged = false;
};

struct EvalReport {
  std::string model;
  std::string env;
  std::string dist;
  double mape = 0.0;
  std::vector<InstanceResult> per_instance;
  std::size_t n_diverged = 0;
  double inference_seconds_per_instance = 0.0;
  double solver_seconds_per_instance = 0.0;
  std::string model_hash;
  std::string benchmark_hash;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Rolls out the policy's grid controls with the oracle's discretization and
/// reports mean |J_opt - J_sol| / J_opt. The mean is taken over the sorted
/// errors, so it does not depend on record order.
EvalReport evaluate_policy(const Policy& policy, const datagen::Benchmark& bench);
EvalReport evaluate_mape(const op::OperatorModel& model, const datagen::Benchmark& bench);

/// Mean wall seconds of one predict_grid call (encode plus forward over the
/// grid), over all instances and repeats, after one warm-up pass.
double time_inference(const op::OperatorModel& model,
                      const std::vector<envs::OcpInstance>& instances, int repeats = 3);

/// Mean wall seconds of solve_direct over the first max_instances instances.
double time_solver(const std::vector<envs::OcpInstance>& instances,
                   const solvers::DirectSolverConfig& cfg, std::size_t max_instances = 20);

std::string params_hash(const op::OperatorModel& model);
std::string benchmark_hash(const datagen::Benchmark& bench);

std::vector<envs::OcpInstance> benchmark_instances(const datagen::Benchmark& bench);

}  // namespace ncolab::train
