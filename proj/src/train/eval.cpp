#include "ncolab/train/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "ncolab/core/error.hpp"
#include "ncolab/core/util.hpp"
#include "ncolab/envs/rollout.hpp"

namespace ncolab::train {

nlohmann::json EvalReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : per_instance) {
    rows.push_back({{"J_opt", r.J_opt},
                    {"J_sol", r.diverged ? nlohmann::json(nullptr) : nlohmann::json(r.J_sol)},
                    {"rel_error", r.rel_error},
                    {"diverged", r.diverged}});
  }
  return {{"model", model},
          {"env", env},
          {"dist", dist},
          {"mape", mape},
          {"n_instances", per_instance.size()},
          {"n_diverged", n_diverged},
          {"inference_seconds_per_instance", inference_seconds_per_instance},
          {"solver_seconds_per_instance", solver_seconds_per_instance},
          {"model_hash", model_hash},
          {"benchmark_hash", benchmark_hash},
          {"per_instance", rows}};
}

std::string EvalReport::csv_header() {
  return "model,env,dist,mape,sec_per_instance,solver_sec_per_instance,n_instances,n_diverged";
}

std::string EvalReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(10) << model << ',' << env << ',' << dist << ',' << mape << ','
     << inference_seconds_per_instance << ',' << solver_seconds_per_instance << ','
     << per_instance.size() << ',' << n_diverged;
  return os.str();
}

EvalReport evaluate_policy(const Policy& policy, const datagen::Benchmark& bench) {
  if (bench.records.empty()) throw ConfigError("benchmark is empty");
  EvalReport rep;
  rep.env = envs::to_string(bench.header.env);
  rep.dist = datagen::to_string(bench.header.label);
  rep.benchmark_hash = benchmark_hash(bench);
  std::vector<double> errors;
  for (const auto& rec : bench.records) {
    InstanceResult r;
    r.J_opt = rec.J_opt;
    try {
      r.J_sol = envs::eval_total_cost(rec.inst, policy(rec.inst));
      if (!std::isfinite(r.J_sol)) throw NumericalError("cost is not finite");
      r.rel_error = std::abs((rec.J_opt - r.J_sol) / rec.J_opt);
    } catch (const NumericalError&) {
      r.diverged = true;
    } catch (const DomainError&) {
      r.diverged = true;
    }
    if (r.diverged) {
      r.rel_error = kDivergedError;
      ++rep.n_diverged;
    }
    errors.push_back(r.rel_error);
    rep.per_instance.push_back(r);
  }
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  rep.mape = sum / static_cast<double>(errors.size());
  return rep;
}

EvalReport evaluate_mape(const op::OperatorModel& model, const datagen::Benchmark& bench) {
  if (bench.header.env != model.encoder().env) {
    throw SchemaError("benchmark is for " + envs::to_string(bench.header.env) +
                      ", model encodes " + envs::to_string(model.encoder().env));
  }
  EvalReport rep = evaluate_policy(
      [&](const envs::OcpInstance& inst) { return model.predict_grid(inst); }, bench);
  rep.model = op::to_string(model.kind());
  rep.model_hash = params_hash(model);
  return rep;
}

double time_inference(const op::OperatorModel& model,
                      const std::vector<envs::OcpInstance>& instances, int repeats) {
  if (instances.empty() || repeats < 1) throw ConfigError("timing needs instances and repeats");
  double sink = 0.0;
  for (const auto& inst : instances) sink += model.predict_grid(inst).values(0, 0);
  const double start = core::now_seconds();
  for (int r = 0; r < repeats; ++r) {
    for (const auto& inst : instances) sink += model.predict_grid(inst).values(0, 0);
  }
  const double elapsed = core::now_seconds() - start;
  if (!std::isfinite(sink)) sink = 0.0;
  return elapsed / static_cast<double>(repeats * instances.size());
}

double time_solver(const std::vector<envs::OcpInstance>& instances,
                   const solvers::DirectSolverConfig& cfg, std::size_t max_instances) {
  const std::size_t n = std::min(instances.size(), max_instances);
  if (n == 0) throw ConfigError("timing needs instances");
  const double start = core::now_seconds();
  for (std::size_t i = 0; i < n; ++i) solvers::solve_direct(instances[i], cfg);
  return (core::now_seconds() - start) / static_cast<double>(n);
}

std::string params_hash(const op::OperatorModel& model) {
  const Eigen::VectorXd p = model.params();
  return core::hex64(core::fnv1a64(std::string_view(
      reinterpret_cast<const char*>(p.data()), static_cast<std::size_t>(p.size()) * sizeof(double))));
}

std::string benchmark_hash(const datagen::Benchmark& bench) {
  std::string blob;
  for (const auto& r : bench.records) {
    blob += envs::instance_to_json(r.inst).dump();
    blob += nlohmann::json(r.J_opt).dump();
    blob += '\n';
  }
  return core::hex64(core::fnv1a64(blob));
}

std::vector<envs::OcpInstance> benchmark_instances(const datagen::Benchmark& bench) {
  std::vector<envs::OcpInstance> out;
  out.reserve(bench.records.size());
  for (const auto& r : bench.records) out.push_back(r.inst);
  return out;
}

}  // namespace ncolab::train
