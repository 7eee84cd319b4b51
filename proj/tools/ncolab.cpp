#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ncolab/core/error.hpp"
#include "ncolab/datagen/dataset.hpp"
#include "ncolab/datagen/distribution.hpp"
#include "ncolab/envs/env.hpp"
#include "ncolab/operator/encoder.hpp"
#include "ncolab/operator/model.hpp"
#include "ncolab/solvers/brachistochrone.hpp"
#include "ncolab/solvers/direct.hpp"
#include "ncolab/solvers/zermelo.hpp"
#include "ncolab/train/eval.hpp"
#include "ncolab/train/train.hpp"

namespace fs = std::filesystem;
using namespace ncolab;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

/// Training-set size, epochs and benchmark size per system.
struct SystemRow {
  envs::EnvId env;
  std::string table;
  std::size_t records;
  int epochs;
};

const std::vector<SystemRow>& system_rows() {
  static const std::vector<SystemRow> rows = {
      {envs::EnvId::Pendulum, "table6", 5000, 10000},
      {envs::EnvId::RobotArm, "table8", 5000, 10000},
      {envs::EnvId::CartPole, "table8", 5000, 2000},
      {envs::EnvId::Quadrotor, "table2", 10000, 500},
      {envs::EnvId::Rocket, "table8", 10000, 500},
      {envs::EnvId::Brachistochrone, "table10", 10000, 5000},
  };
  return rows;
}

const SystemRow& system_row(envs::EnvId env) {
  for (const auto& r : system_rows()) {
    if (r.env == env) return r;
  }
  throw ConfigError("no hyperparameter row for environment " + envs::to_string(env));
}

constexpr std::size_t kBenchmarkSize = 100;

struct Preset {
  SystemRow row;
  op::OperatorKind kind;
};

std::map<std::string, Preset> presets() {
  std::map<std::string, Preset> out;
  for (const auto& r : system_rows()) {
    for (auto k : {op::OperatorKind::NASM, op::OperatorKind::SNO, op::OperatorKind::DON,
                   op::OperatorKind::MLP}) {
      out.emplace(envs::to_string(r.env) + "-" + r.table + "-" + op::to_string(k), Preset{r, k});
    }
  }
  return out;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, p] : presets()) names.push_back(name);
  return names;
}

const Preset* find_preset(const std::string& name) {
  static const auto table = presets();
  if (name.empty()) return nullptr;
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown preset '" + name + "'");
  return &it->second;
}

/// Assigns a preset value when neither a flag nor the config file set the option.
template <class T>
void preset_default(const CLI::Option* opt, T& target, const T& value) {
  if (opt->count() == 0) target = value;
}

void ensure_parent(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_constants(envs::EnvSpec& env, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("constant override '" + a + "' is not name=value");
    }
    const std::string name = a.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(a.substr(eq + 1), &used);
      if (used != a.size() - eq - 1) throw std::invalid_argument(a);
    } catch (const std::exception&) {
      throw ConfigError("constant override '" + a + "' has no numeric value");
    }
    try {
      env.set_constant(name, value);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  env.validate();
}

/// Options of the direct method shared by gen-data, gen-bench and solve.
struct SolverOptions {
  solvers::DirectSolverConfig cfg;
  std::string u_init = "zeros";

  void add(CLI::App* app) {
    app->add_option("--n-knots", cfg.n_knots, "Control knots of the direct method")
        ->capture_default_str();
    app->add_option("--max-iters", cfg.max_iters, "Adam iterations")->capture_default_str();
    app->add_option("--solver-lr", cfg.lr0, "Initial Adam step")->capture_default_str();
    app->add_option("--solver-decay", cfg.decay, "Step decay factor")->capture_default_str();
    app->add_option("--solver-decay-period", cfg.decay_period, "Iterations per decay")
        ->capture_default_str();
    app->add_option("--grad-tol", cfg.grad_tol, "Gradient max-norm for convergence")
        ->capture_default_str();
    app->add_option("--polish-iters", cfg.polish_iters, "L-BFGS polish iterations")
        ->capture_default_str();
    app->add_option("--u-init", u_init, "Initial control knots")
        ->check(CLI::IsMember({"zeros", "small_uniform"}))
        ->capture_default_str();
  }

  solvers::DirectSolverConfig resolve() {
    cfg.u_init = solvers::control_init_from_string(u_init);
    cfg.validate();
    return cfg;
  }
};

/// Environment choice with optional constant overrides and preset.
struct EnvOptions {
  std::string env;
  std::vector<std::string> constants;
  CLI::Option* env_opt = nullptr;

  void add(CLI::App* app) {
    std::vector<std::string> names;
    for (auto id : {envs::EnvId::Pendulum, envs::EnvId::RobotArm, envs::EnvId::CartPole,
                    envs::EnvId::Quadrotor, envs::EnvId::Rocket, envs::EnvId::Brachistochrone,
                    envs::EnvId::Zermelo, envs::EnvId::Linear}) {
      names.push_back(envs::to_string(id));
    }
    env_opt = app->add_option("--env", env, "Environment")->check(CLI::IsMember(names));
    app->add_option("--constant", constants, "Dynamics constant override name=value (repeatable)");
  }

  envs::EnvId id() const {
    if (env.empty()) throw ConfigError("--env is required (directly or through --preset)");
    return envs::env_from_string(env);
  }
};

void add_preset(CLI::App* app, std::string& preset) {
  app->add_option("--preset", preset, "Named hyperparameter preset <env>-<table>-<model>")
      ->check(CLI::IsMember(preset_names()));
}

void add_seed(CLI::App* app, std::uint64_t& seed) {
  app->add_option("--seed", seed, "Random seed")->envname("NCOLAB_SEED")->capture_default_str();
}

datagen::DistributionSpec make_dist(const EnvOptions& env, const std::string& label, bool more) {
  auto dist = datagen::make_distribution(env.id(), datagen::dist_label_from_string(label), more);
  apply_constants(dist.base.env, env.constants);
  dist.validate();
  return dist;
}

void print_stats(const std::string& what, std::size_t n, const datagen::GenerationStats& s,
                 const fs::path& out) {
  std::cerr << what << ": " << n << " records from " << s.attempted - s.dropped << " of "
            << s.attempted << " instances (" << s.dropped << " dropped, " << s.solve_seconds
            << " s solving) -> " << out.string() << "\n";
}

// gen-data ------------------------------------------------------------------

struct GenDataCmd {
  EnvOptions env;
  SolverOptions solver;
  std::string preset, dist = "id", out;
  std::size_t size = 5000;
  int n_queries = 10;
  int threads = 1;
  bool more = false;
  std::uint64_t seed = 0;
  CLI::Option* size_opt = nullptr;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen-data", "Solve sampled instances and write a training dataset");
    env.add(c);
    add_preset(c, preset);
    c->add_option("--dist", dist, "Distribution label")
        ->check(CLI::IsMember({"id", "ood", "ood1", "ood2", "ood3"}))
        ->capture_default_str();
    size_opt = c->add_option("--size", size, "Number of records")->capture_default_str();
    c->add_option("--n-queries", n_queries, "Records per solved instance")->capture_default_str();
    c->add_option("--threads", threads, "Worker threads")->capture_default_str();
    c->add_flag("--more-variables", more, "Also vary dynamics constants and initial states");
    add_seed(c, seed);
    c->add_option("--out", out, "Output JSONL file")->required();
    solver.add(c);
  }

  int run() {
    if (const Preset* p = find_preset(preset)) {
      preset_default(env.env_opt, env.env, envs::to_string(p->row.env));
      preset_default(size_opt, size, p->row.records);
    }
    if (size == 0) throw ConfigError("--size must be positive");
    const auto dist_spec = make_dist(env, dist, more);
    datagen::GenerationStats stats;
    const auto d = datagen::generate_dataset(dist_spec, size, solver.resolve(), seed, n_queries,
                                             threads, &stats);
    ensure_parent(out);
    datagen::write_dataset(out, d);
    print_stats("gen-data", d.records.size(), stats, out);
    return kOk;
  }
};

// gen-bench -----------------------------------------------------------------

struct GenBenchCmd {
  EnvOptions env;
  SolverOptions solver;
  std::string preset, dist = "id", out;
  std::size_t n = kBenchmarkSize;
  int threads = 1;
  bool more = false;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen-bench", "Solve sampled instances and write a J_opt benchmark");
    env.add(c);
    add_preset(c, preset);
    c->add_option("--dist", dist, "Distribution label")
        ->check(CLI::IsMember({"id", "ood", "ood1", "ood2", "ood3"}))
        ->capture_default_str();
    c->add_option("--n", n, "Number of instances")->capture_default_str();
    c->add_option("--threads", threads, "Worker threads")->capture_default_str();
    c->add_flag("--more-variables", more, "Also vary dynamics constants and initial states");
    add_seed(c, seed);
    c->add_option("--out", out, "Output JSONL file")->required();
    solver.add(c);
  }

  int run() {
    if (const Preset* p = find_preset(preset)) {
      preset_default(env.env_opt, env.env, envs::to_string(p->row.env));
    }
    if (n == 0) throw ConfigError("--n must be positive");
    const auto dist_spec = make_dist(env, dist, more);
    datagen::GenerationStats stats;
    const auto b =
        datagen::generate_benchmark(dist_spec, n, solver.resolve(), seed, threads, &stats);
    ensure_parent(out);
    datagen::write_benchmark(out, b);
    print_stats("gen-bench", b.records.size(), stats, out);
    return kOk;
  }
};

// train ---------------------------------------------------------------------

struct TrainCmd {
  std::string preset, data, val, out, log;
  std::string kind = "nasm", basis = "fourier", aggregation = "sum";
  int p = 11;
  bool fixed_basis = false, static_coef = false;
  std::size_t records = 0;
  train::TrainConfig cfg;
  std::uint64_t seed = 0;
  CLI::Option *kind_opt = nullptr, *epochs_opt = nullptr;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train", "Train an operator on a dataset and write a checkpoint");
    add_preset(c, preset);
    c->add_option("--data", data, "Training dataset (JSONL)")->required();
    c->add_option("--val", val, "Validation dataset (JSONL)");
    c->add_option("--out", out, "Checkpoint stem (writes <stem>.json and <stem>.bin)")->required();
    c->add_option("--log", log, "Loss curve output (JSON)");
    kind_opt = c->add_option("--model", kind, "Operator architecture")
                   ->check(CLI::IsMember({"nasm", "sno", "don", "mlp"}))
                   ->capture_default_str();
    c->add_option("--basis", basis, "Basis family (nasm)")
        ->check(CLI::IsMember({"fourier", "chebyshev"}))
        ->capture_default_str();
    c->add_option("--basis-size", p, "Number of basis functions (nasm, sno)")
        ->capture_default_str();
    c->add_flag("--fixed-basis", fixed_basis, "Disable adaptive basis parameters (nasm)");
    c->add_flag("--static-coef", static_coef, "Time-independent coefficients (nasm)");
    c->add_option("--aggregation", aggregation, "Aggregation of basis terms (nasm)")
        ->check(CLI::IsMember({"sum", "neural"}))
        ->capture_default_str();
    c->add_option("--records", records, "Use only the first N records (0 = all)")
        ->capture_default_str();
    epochs_opt = c->add_option("--epochs", cfg.epochs, "Epochs")->capture_default_str();
    c->add_option("--batch", cfg.max_batch, "Maximum batch size")->capture_default_str();
    c->add_option("--lr", cfg.lr0, "Initial learning rate")->capture_default_str();
    c->add_option("--decay", cfg.decay, "Learning-rate decay factor")->capture_default_str();
    c->add_option("--decay-period", cfg.decay_period, "Epochs per decay")->capture_default_str();
    c->add_option("--validate-every", cfg.validate_every, "Epochs between validation losses")
        ->capture_default_str();
    add_seed(c, seed);
  }

  op::OperatorConfig operator_config(envs::EnvId env, int enc_dim, int d_u) const {
    const auto k = op::operator_kind_from_string(kind);
    const bool spectral = k == op::OperatorKind::NASM || k == op::OperatorKind::SNO;
    const bool switched =
        fixed_basis || static_coef || aggregation != "sum" || basis != "fourier" || p != 11;
    if (!spectral && switched) throw ConfigError("basis switches apply to nasm and sno only");
    if (k == op::OperatorKind::SNO && aggregation != "sum") {
      throw ConfigError("sno always uses sum aggregation");
    }
    auto c = op::default_config(k, env, enc_dim, d_u);
    if (spectral) {
      c.nasm.basis.kind = op::basis_kind_from_string(basis);
      c.nasm.basis.p = p;
    }
    if (k == op::OperatorKind::NASM) {
      c.nasm.basis.adaptive = !fixed_basis;
      c.nasm.non_static_coef = !static_coef;
      c.nasm.aggregation = op::aggregation_from_string(aggregation);
    }
    try {
      c.validate();
      c.nasm.basis.validate();
    } catch (const DimensionError& e) {
      throw ConfigError(e.what());
    }
    return c;
  }

  int run() {
    const auto ds = datagen::read_dataset(data);
    const envs::EnvId env = ds.header.env;
    if (const Preset* p = find_preset(preset)) {
      if (p->row.env != env) {
        throw ConfigError("preset " + preset + " is for " + envs::to_string(p->row.env) +
                          " but the dataset is " + envs::to_string(env));
      }
      preset_default(kind_opt, kind, op::to_string(p->kind));
      preset_default(epochs_opt, cfg.epochs, p->row.epochs);
    }
    const bool more = datagen::distribution_from_json(ds.header.distribution).more_variables;
    const auto instances = datagen::dataset_instances(ds);
    const auto enc = op::fit_encoder(instances, more);
    const int d_u = envs::make_env(env).d_u;
    op::OperatorModel model(operator_config(env, enc.dim(), d_u), enc, d_u, seed);
    cfg.seed = seed;
    cfg.validate();

    const auto arrays = train::make_arrays(ds, enc, records);
    std::optional<train::TrainingArrays> val_arrays;
    if (!val.empty()) val_arrays = train::make_arrays(datagen::read_dataset(val), enc);
    std::cerr << "train: " << op::to_string(model.kind()) << " with " << model.num_params()
              << " parameters on " << arrays.size() << " records for " << cfg.epochs
              << " epochs\n";
    const auto r = train::train(model, arrays, cfg, val_arrays ? &*val_arrays : nullptr);
    ensure_parent(out);
    model.save(out);
    if (!log.empty()) {
      nlohmann::json j = train::train_result_to_json(r);
      j["config"] = cfg.to_json();
      write_text(log, j.dump(1) + "\n");
    }
    std::cerr << "train: final loss " << r.final_loss << " after " << r.seconds << " s -> "
              << out << "\n";
    return kOk;
  }
};

// finetune ------------------------------------------------------------------

struct FinetuneCmd {
  std::string preset, model_path, data, out, log, freeze = "default";
  train::FinetuneConfig cfg;
  std::uint64_t seed = 0;
  CLI::Option *id_records_opt = nullptr, *id_epochs_opt = nullptr;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("finetune", "Continue training a checkpoint on shifted data");
    add_preset(c, preset);
    c->add_option("--model", model_path, "Input checkpoint stem")->required();
    c->add_option("--data", data, "Fine-tuning dataset (JSONL)")->required();
    c->add_option("--out", out, "Output checkpoint stem")->required();
    c->add_option("--log", log, "Loss curve output (JSON)");
    c->add_option("--dataset-fraction", cfg.dataset_fraction,
                  "Records as a fraction of the training-set size")
        ->capture_default_str();
    c->add_option("--epoch-fraction", cfg.epoch_fraction,
                  "Epochs as a fraction of the training epochs")
        ->capture_default_str();
    c->add_option("--lr", cfg.lr, "Fixed learning rate")->capture_default_str();
    c->add_option("--freeze", freeze, "Parameters held fixed")
        ->check(CLI::IsMember({"none", "default", "all"}))
        ->capture_default_str();
    id_records_opt = c->add_option("--id-records", cfg.id_records,
                                   "Training-set size (default from the system table)");
    id_epochs_opt = c->add_option("--id-epochs", cfg.id_epochs,
                                  "Training epochs (default from the system table)");
    c->add_option("--batch", cfg.max_batch, "Maximum batch size")->capture_default_str();
    add_seed(c, seed);
  }

  int run() {
    auto model = op::OperatorModel::load(model_path);
    const envs::EnvId env = model.encoder().env;
    const Preset* p = find_preset(preset);
    if (p && p->row.env != env) {
      throw ConfigError("preset " + preset + " does not match the checkpoint environment " +
                        envs::to_string(env));
    }
    const SystemRow& row = p ? p->row : system_row(env);
    preset_default(id_records_opt, cfg.id_records, row.records);
    preset_default(id_epochs_opt, cfg.id_epochs, row.epochs);
    cfg.freeze = op::freeze_set_from_string(freeze);
    cfg.seed = seed;
    cfg.validate();

    const auto arrays = train::make_arrays(datagen::read_dataset(data), model.encoder());
    std::cerr << "finetune: " << cfg.records() << " records, " << cfg.epochs() << " epochs at lr "
              << cfg.lr << "\n";
    const auto r = train::finetune(model, arrays, cfg);
    ensure_parent(out);
    model.save(out);
    if (!log.empty()) {
      nlohmann::json j = train::train_result_to_json(r);
      j["config"] = cfg.to_json();
      write_text(log, j.dump(1) + "\n");
    }
    std::cerr << "finetune: final loss " << r.final_loss << " -> " << out << "\n";
    return kOk;
  }
};

// eval ----------------------------------------------------------------------

struct EvalCmd {
  std::string model_path, bench, name, json_out, csv_out;
  int repeats = 3;
  std::size_t solver_instances = 0;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("eval", "Report MAPE and timing of a checkpoint on a benchmark");
    c->add_option("--model", model_path, "Checkpoint stem")->required();
    c->add_option("--bench", bench, "Benchmark (JSONL)")->required();
    c->add_option("--name", name, "Model label in the report (default: architecture)");
    c->add_option("--json", json_out, "Report output (JSON, default stdout)");
    c->add_option("--csv", csv_out, "Report output (CSV header and one row)");
    c->add_option("--repeats", repeats, "Timed inference passes (0 skips timing)")
        ->capture_default_str();
    c->add_option("--solver-instances", solver_instances,
                  "Instances re-solved to time the direct method (0 skips)")
        ->capture_default_str();
  }

  int run() {
    const auto model = op::OperatorModel::load(model_path);
    const auto b = datagen::read_benchmark(bench);
    auto report = train::evaluate_mape(model, b);
    if (!name.empty()) report.model = name;
    const auto instances = train::benchmark_instances(b);
    if (repeats > 0) report.inference_seconds_per_instance = train::time_inference(model, instances, repeats);
    if (solver_instances > 0) {
      report.solver_seconds_per_instance = train::time_solver(
          instances, solvers::direct_config_from_json(b.header.solver_config), solver_instances);
    }
    const std::string j = report.to_json().dump(1) + "\n";
    if (json_out.empty()) {
      std::cout << j;
    } else {
      write_text(json_out, j);
    }
    if (!csv_out.empty()) {
      write_text(csv_out, train::EvalReport::csv_header() + "\n" + report.csv_row() + "\n");
    }
    std::cerr << "eval: " << report.model << " " << report.env << "/" << report.dist << " MAPE "
              << report.mape << " (" << report.n_diverged << " diverged)\n";
    return kOk;
  }
};

// solve ---------------------------------------------------------------------

struct SolveCmd {
  EnvOptions env;
  SolverOptions solver;
  std::string instance, out;
  std::vector<double> x_goal, x_init;
  std::optional<double> tf;
  std::optional<int> n_grid;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("solve", "Solve one instance with the direct method");
    env.add(c);
    c->add_option("--instance", instance, "Instance JSON file (overrides the default instance)");
    c->add_option("--x-goal", x_goal, "Goal state");
    c->add_option("--x-init", x_init, "Initial state");
    c->add_option("--tf", tf, "Horizon");
    c->add_option("--n-grid", n_grid, "Euler grid points");
    c->add_option("--out", out, "Solution output (JSON, default stdout)");
    solver.add(c);
  }

  envs::OcpInstance make() const {
    envs::OcpInstance inst;
    if (!instance.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(instance));
      } catch (const nlohmann::json::exception& e) {
        throw SchemaError(instance + ": " + e.what());
      }
      inst = envs::instance_from_json(j);
      if (!env.env.empty() && envs::env_from_string(env.env) != inst.env.id) {
        throw ConfigError("--env disagrees with the environment in " + instance);
      }
    } else {
      inst = envs::make_instance(env.id());
    }
    apply_constants(inst.env, env.constants);
    const auto assign = [](Eigen::VectorXd& dst, const std::vector<double>& src, const char* what) {
      if (src.empty()) return;
      if (static_cast<Eigen::Index>(src.size()) != dst.size()) {
        throw ConfigError(std::string(what) + " needs " + std::to_string(dst.size()) + " values");
      }
      dst = Eigen::Map<const Eigen::VectorXd>(src.data(), dst.size());
    };
    assign(inst.cost.x_goal, x_goal, "--x-goal");
    assign(inst.x_init, x_init, "--x-init");
    if (tf) inst.tf = *tf;
    if (n_grid) inst.n_grid = *n_grid;
    try {
      inst.validate();
    } catch (const DimensionError& e) {
      throw ConfigError(e.what());
    }
    return inst;
  }

  int run() {
    const auto inst = make();
    nlohmann::json j;
    if (inst.env.id == envs::EnvId::Zermelo) {
      const auto sol = solvers::zermelo_solve(inst);
      j = {{"env", "zermelo"},
           {"instance", envs::instance_to_json(inst)},
           {"T", sol.T},
           {"miss", sol.miss},
           {"rho", sol.rho},
           {"iters_used", sol.iters_used},
           {"wall_time_seconds", sol.wall_time_seconds}};
      std::vector<double> beta(sol.beta.values.data(),
                               sol.beta.values.data() + sol.beta.values.size());
      j["beta"] = beta;
    } else {
      const auto sol = solvers::solve_direct(inst, solver.resolve());
      j = solvers::solution_to_json(inst, sol);
      if (inst.env.id == envs::EnvId::Brachistochrone) {
        const auto c = solvers::brachistochrone_analytic(
            inst.x_init[0], inst.env.constant("x1"), inst.env.constant("x2"),
            inst.cost.x_goal[0], inst.env.constant("g"));
        j["analytic_T"] = c.T;
      }
      std::cerr << "solve: J = " << sol.J << (sol.converged ? " (converged)" : " (not converged)")
                << "\n";
    }
    const std::string text = j.dump(1) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      write_text(out, text);
    }
    return kOk;
  }
};

// plot ----------------------------------------------------------------------

struct PlotCmd {
  std::vector<std::string> inputs;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand(
        "plot", "Merge eval CSV rows into bar-chart data: time, ID MAPE, OOD MAPE per model");
    c->add_option("inputs", inputs, "Eval CSV files")->required();
    c->add_option("--out", out, "Output CSV (default stdout)");
  }

  struct Series {
    std::string env;
    double seconds_sum = 0.0;
    int seconds_n = 0;
    std::map<std::string, std::string> mape;  // dist -> value
  };

  int run() {
    const std::string header = train::EvalReport::csv_header();
    std::vector<std::string> order;
    std::map<std::string, Series> series;
    std::vector<std::string> dists;
    for (const auto& path : inputs) {
      std::istringstream in(read_text(path));
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == header) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 8) {
          throw SchemaError(path + " line " + std::to_string(line_no) + ": expected 8 fields");
        }
        const std::string& model = f[0];
        if (!series.count(model)) order.push_back(model);
        Series& s = series[model];
        if (!s.env.empty() && s.env != f[1]) {
          throw SchemaError(path + " line " + std::to_string(line_no) + ": model " + model +
                            " appears with two environments");
        }
        s.env = f[1];
        s.mape[f[2]] = f[3];
        try {
          const double sec = std::stod(f[4]);
          if (sec > 0.0) {
            s.seconds_sum += sec;
            ++s.seconds_n;
          }
        } catch (const std::exception&) {
          throw SchemaError(path + " line " + std::to_string(line_no) + ": bad sec_per_instance");
        }
        if (std::find(dists.begin(), dists.end(), f[2]) == dists.end()) dists.push_back(f[2]);
      }
    }
    std::sort(dists.begin(), dists.end());
    std::ostringstream o;
    o << "series,env,sec_per_instance";
    for (const auto& d : dists) o << "," << d << "_mape";
    o << "\n";
    for (const auto& name : order) {
      const Series& s = series[name];
      o << name << "," << s.env << ",";
      if (s.seconds_n > 0) {
        std::ostringstream v;
        v.precision(6);
        v << s.seconds_sum / s.seconds_n;
        o << v.str();
      }
      for (const auto& d : dists) {
        o << ",";
        if (auto it = s.mape.find(d); it != s.mape.end()) o << it->second;
      }
      o << "\n";
    }
    if (out.empty()) {
      std::cout << o.str();
    } else {
      write_text(out, o.str());
    }
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural control operators: data generation, training, evaluation and solving"};
  app.set_config("--config", "", "INI config file; [section] names a subcommand, flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  GenDataCmd gen_data;
  GenBenchCmd gen_bench;
  TrainCmd train_cmd;
  FinetuneCmd finetune_cmd;
  EvalCmd eval_cmd;
  SolveCmd solve_cmd;
  PlotCmd plot_cmd;
  gen_data.add(app);
  gen_bench.add(app);
  train_cmd.add(app);
  finetune_cmd.add(app);
  eval_cmd.add(app);
  solve_cmd.add(app);
  plot_cmd.add(app);
  for (auto* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen-data") return gen_data.run();
    if (name == "gen-bench") return gen_bench.run();
    if (name == "train") return train_cmd.run();
    if (name == "finetune") return finetune_cmd.run();
    if (name == "eval") return eval_cmd.run();
    if (name == "solve") return solve_cmd.run();
    return plot_cmd.run();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
