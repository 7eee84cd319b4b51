#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ncolab/core/finite_diff.hpp"
#include "ncolab/core/util.hpp"
#include "ncolab/datagen/dataset.hpp"
#include "ncolab/datagen/distribution.hpp"
#include "ncolab/envs/rollout.hpp"
#include "ncolab/operator/basis.hpp"
#include "ncolab/operator/encoder.hpp"
#include "ncolab/operator/model.hpp"
#include "ncolab/solvers/brachistochrone.hpp"
#include "ncolab/solvers/direct.hpp"
#include "ncolab/solvers/objective.hpp"
#include "ncolab/solvers/zermelo.hpp"
#include "ncolab/train/eval.hpp"
#include "ncolab/train/train.hpp"

namespace fs = std::filesystem;
using namespace ncolab;
using envs::EnvId;

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances and budgets.
constexpr double kGradTol = 1e-5;
constexpr double kCycloidTol = 1e-9;
constexpr double kDirectBrachTol = 1e-2;
constexpr double kZermeloTimeTol = 5e-3;
constexpr double kZermeloMissTol = 1e-3;
constexpr double kZermeloResidualTol = 1e-2;
constexpr double kIdMapeGate = 1e-2;
constexpr double kOodMapeGate = 1e-1;
constexpr double kSpeedupGate = 100.0;
constexpr double kThetaBound = 0.5;
constexpr double kReductionTol = 1e-15;
constexpr double kReconstructionTol = 1e-12;

constexpr std::size_t kTrainRecords = 1000;
constexpr int kTrainEpochs = 2000;
constexpr std::size_t kBenchInstances = 50;

std::string sci(double v, int digits = 3) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(digits - 1) << v;
  return s.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

// Gradient oracle -------------------------------------------------------------

Outcome gradient_oracle() {
  const std::vector<EnvId> envs_ = {EnvId::Pendulum, EnvId::RobotArm, EnvId::CartPole,
                                    EnvId::Quadrotor, EnvId::Rocket};
  const int n_knots = 20;
  double worst = 0.0;
  std::string worst_env;
  int grids = 0;
  for (EnvId id : envs_) {
    auto inst = envs::make_instance(id);
    inst.n_grid = 101;
    const int d_u = inst.env.d_u;
    auto rng = core::make_stream(2024, "acceptance/gradient/" + envs::to_string(id));
    std::normal_distribution<double> n(0.0, 1.0);
    for (int g = 0; g < 10; ++g) {
      Eigen::VectorXd knots(n_knots * d_u);
      for (Eigen::Index i = 0; i < knots.size(); ++i) knots[i] = n(rng);
      const Eigen::MatrixXd adj =
          solvers::adjoint_gradient(inst, solvers::unflatten(knots, n_knots, d_u));
      const Eigen::VectorXd fd = core::finite_diff_grad(
          [&](std::span<const double> p) {
            const Eigen::VectorXd k = Eigen::Map<const Eigen::VectorXd>(p.data(), knots.size());
            return envs::eval_total_cost(inst, solvers::unflatten(k, n_knots, d_u));
          },
          std::span<const double>(knots.data(), static_cast<std::size_t>(knots.size())));
      const double err = core::relative_error(solvers::flatten(envs::ControlGrid{adj}), fd);
      if (err > worst) {
        worst = err;
        worst_env = envs::to_string(id);
      }
      ++grids;
    }
  }
  return {worst < kGradTol, "max rel err " + sci(worst) + " (" + worst_env + ") over " +
                                std::to_string(grids) + " grids, tol " + sci(kGradTol, 1)};
}

// Brachistochrone -------------------------------------------------------------

Outcome brachistochrone_regression() {
  const double g = 10.0;
  const auto cyc = solvers::brachistochrone_analytic(2.0, 0.0, kPi, 0.0, g);
  const double exact = kPi / std::sqrt(g);
  const double analytic_err = std::abs(cyc.T - exact);

  auto inst = envs::make_instance(EnvId::Brachistochrone);
  inst.env.set_constant("g", g);
  inst.env.set_constant("x1", 0.0);
  inst.env.set_constant("x2", kPi);
  inst.tf = kPi;
  inst.x_init << 2.0;
  inst.cost.x_goal << 0.0;
  const auto sol = solvers::solve_direct(inst, {});
  const double dm_rel = std::abs(sol.J - cyc.T) / cyc.T;
  return {analytic_err < kCycloidTol && dm_rel < kDirectBrachTol,
          "analytic |T - pi/sqrt(10)| " + sci(analytic_err) + " (tol " + sci(kCycloidTol, 1) +
              "), direct method rel err " + sci(dm_rel) + " (tol " + sci(kDirectBrachTol, 1) +
              ")"};
}

// Zermelo ----------------------------------------------------------------------

Outcome zermelo_zero_current() {
  const auto base = envs::make_instance(EnvId::Zermelo);
  const auto sol = solvers::zermelo_solve(base);
  const double exact = std::sqrt(2.0) / 2.0;
  const double t_rel = std::abs(sol.T - exact) / exact;

  auto rng = core::make_stream(7, "acceptance/zermelo");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_residual = 0.0, worst_miss = sol.miss;
  for (int i = 0; i < 10; ++i) {
    auto inst = base;
    inst.cost.x_goal << 1.0 + u(rng), 1.0 + u(rng);
    inst.env.constants << 2.0 + u(rng), u(rng), u(rng), u(rng), u(rng);
    const auto s = solvers::zermelo_solve(inst);
    const auto& k = inst.env.constants;
    const double r = solvers::zermelo_formula_residual(s.beta.values.col(0),
                                                       s.T / s.beta.n_knots(), k[1], k[2], k[3],
                                                       k[4]);
    worst_residual = std::max(worst_residual, r);
    worst_miss = std::max(worst_miss, s.miss);
  }
  return {t_rel < kZermeloTimeTol && sol.miss < kZermeloMissTol &&
              worst_residual < kZermeloResidualTol && worst_miss < kZermeloMissTol,
          "zero-current T rel err " + sci(t_rel) + ", miss " + sci(sol.miss) +
              "; 10 ID instances max RMS residual " + sci(worst_residual) + " (tol " +
              sci(kZermeloResidualTol, 1) + "), max miss " + sci(worst_miss)};
}

// Pendulum pipeline -------------------------------------------------------------

/// Data and models shared by the Pendulum criteria.
struct Pendulum {
  solvers::DirectSolverConfig solver;
  datagen::Dataset train_set;
  datagen::Benchmark id_bench, ood_bench;
  op::EncoderSpec encoder;
  train::TrainingArrays arrays;
  train::TrainConfig train_cfg;
  std::unique_ptr<op::OperatorModel> nasm;
  double nasm_id = 0.0, nasm_ood = 0.0;
};

op::OperatorModel make_model(op::OperatorKind kind, const Pendulum& p) {
  return op::OperatorModel(op::default_config(kind, EnvId::Pendulum, p.encoder.dim(), 1),
                           p.encoder, 1, 0);
}

Outcome pendulum_end_to_end(Pendulum& p, const fs::path& workdir) {
  p.train_set = datagen::generate_dataset(
      datagen::make_distribution(EnvId::Pendulum, datagen::DistLabel::ID), kTrainRecords,
      p.solver, 1);
  p.id_bench = datagen::generate_benchmark(
      datagen::make_distribution(EnvId::Pendulum, datagen::DistLabel::ID), kBenchInstances,
      p.solver, 2);
  p.ood_bench = datagen::generate_benchmark(
      datagen::make_distribution(EnvId::Pendulum, datagen::DistLabel::OOD), kBenchInstances,
      p.solver, 2);
  datagen::write_dataset(workdir / "pendulum_id_train.jsonl", p.train_set);
  datagen::write_benchmark(workdir / "pendulum_id_bench.jsonl", p.id_bench);
  datagen::write_benchmark(workdir / "pendulum_ood_bench.jsonl", p.ood_bench);

  const auto instances = datagen::dataset_instances(p.train_set);
  p.encoder = op::fit_encoder(instances, false);
  p.arrays = train::make_arrays(p.train_set, p.encoder);
  p.train_cfg.epochs = kTrainEpochs;
  p.nasm = std::make_unique<op::OperatorModel>(make_model(op::OperatorKind::NASM, p));
  const auto r = train::train(*p.nasm, p.arrays, p.train_cfg);
  p.nasm->save(workdir / "pendulum_nasm");
  p.nasm_id = train::evaluate_mape(*p.nasm, p.id_bench).mape;
  p.nasm_ood = train::evaluate_mape(*p.nasm, p.ood_bench).mape;
  return {p.nasm_id < kIdMapeGate && p.nasm_ood < kOodMapeGate,
          std::to_string(p.arrays.size()) + " records, " + std::to_string(kTrainEpochs) +
              " epochs, final loss " + sci(r.final_loss) + "; ID MAPE " + sci(p.nasm_id) +
              " (gate " + sci(kIdMapeGate, 1) + "), OOD MAPE " + sci(p.nasm_ood) + " (gate " +
              sci(kOodMapeGate, 1) + ")"};
}

Outcome baseline_ordering(Pendulum& p) {
  if (!p.nasm) return {false, "NASM run unavailable"};
  auto sno = make_model(op::OperatorKind::SNO, p);
  train::train(sno, p.arrays, p.train_cfg);
  const double sno_id = train::evaluate_mape(sno, p.id_bench).mape;
  return {sno_id > p.nasm_id, "ID MAPE SNO (fixed Fourier) " + sci(sno_id) +
                                  " vs NASM (adaptive Fourier) " + sci(p.nasm_id) + ", " +
                                  std::to_string(sno.num_params()) + " vs " +
                                  std::to_string(p.nasm->num_params()) + " params"};
}

Outcome finetune_direction(Pendulum& p, const fs::path& workdir) {
  if (!p.nasm) return {false, "NASM run unavailable"};
  train::FinetuneConfig cfg;
  cfg.id_records = p.arrays.size();
  cfg.id_epochs = kTrainEpochs;
  const auto ood1 = datagen::make_distribution(EnvId::Pendulum, datagen::DistLabel::OOD1);
  const auto data = datagen::generate_dataset(ood1, cfg.records(), p.solver, 3);
  const auto bench = datagen::generate_benchmark(ood1, kBenchInstances, p.solver, 4);
  datagen::write_dataset(workdir / "pendulum_ood1_finetune.jsonl", data);
  datagen::write_benchmark(workdir / "pendulum_ood1_bench.jsonl", bench);

  op::OperatorModel model = op::OperatorModel::load(workdir / "pendulum_nasm");
  const double before = train::evaluate_mape(model, bench).mape;
  const Eigen::VectorXd p0 = model.params();
  train::finetune(model, train::make_arrays(data, model.encoder()), cfg);
  const double after = train::evaluate_mape(model, bench).mape;
  const Eigen::VectorXd p1 = model.params();
  const auto mask = model.frozen_mask(cfg.freeze);
  std::size_t frozen = 0, frozen_changed = 0, free_changed = 0;
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    const bool same = std::memcmp(&p0[i], &p1[i], sizeof(double)) == 0;
    if (mask[static_cast<std::size_t>(i)]) {
      ++frozen;
      frozen_changed += !same;
    } else {
      free_changed += !same;
    }
  }
  return {after < before && frozen > 0 && frozen_changed == 0 && free_changed > 0,
          "OOD1 MAPE " + sci(before) + " -> " + sci(after) + " (" +
              std::to_string(cfg.records()) + " records, " + std::to_string(cfg.epochs()) +
              " epochs, lr " + sci(cfg.lr, 1) + "); " + std::to_string(frozen_changed) + " of " +
              std::to_string(frozen) + " frozen params changed"};
}

Outcome speedup(Pendulum& p) {
  if (!p.nasm) return {false, "NASM run unavailable"};
  const auto instances = train::benchmark_instances(p.id_bench);
  const double model_s = train::time_inference(*p.nasm, instances, 3);
  const double solver_s = train::time_solver(instances, p.solver, 20);
  const double ratio = solver_s / model_s;
  return {ratio > kSpeedupGate, "solver " + sci(solver_s) + " s vs NASM " + sci(model_s) +
                                    " s per instance, ratio " + sci(ratio) + " (gate " +
                                    sci(kSpeedupGate, 1) + ")"};
}

// Operator properties -------------------------------------------------------------

/// Classical basis value written out independently of the library.
double classical_basis(op::BasisKind kind, int j, double t) {
  if (kind == op::BasisKind::Fourier) {
    if (j == 0) return 1.0;
    const int k = (j + 1) / 2;
    return (j % 2 == 1) ? std::sin(k * kPi * t) : std::cos(k * kPi * t);
  }
  const double x = 2.0 * t - 1.0;
  double prev = 1.0, cur = x;
  if (j == 0) return prev;
  for (int i = 1; i < j; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Outcome operator_properties() {
  std::vector<std::string> failures;
  std::ostringstream detail;

  // Bounded adaptive parameters.
  {
    op::OperatorModel m(op::OperatorConfig{}, op::identity_encoder(EnvId::Pendulum, false), 1, 9);
    for (auto& l : m.net("coef").layers) l.weight *= 25.0;
    auto rng = core::make_stream(9, "acceptance/theta");
    std::uniform_real_distribution<double> ue(-50.0, 50.0), ut(0.0, 1.0);
    const int n = 100000;
    Eigen::MatrixXd e(2, n);
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) {
      e(0, i) = ue(rng);
      e(1, i) = ue(rng);
      t[i] = ut(rng);
    }
    const double max_theta = m.theta(e, t).cwiseAbs().maxCoeff();
    detail << "max|theta| " << max_theta << " on 1e5 samples";
    if (!(max_theta <= kThetaBound)) failures.push_back("theta bound");
  }

  // Zero adaptive parameters give the classical basis.
  {
    double worst = 0.0;
    for (op::BasisKind kind : {op::BasisKind::Fourier, op::BasisKind::Chebyshev}) {
      op::BasisSpec spec;
      spec.kind = kind;
      const std::vector<double> zeros(static_cast<std::size_t>(spec.n_theta()), 0.0);
      for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const Eigen::VectorXd b = op::eval_basis(spec, t, zeros);
        for (int j = 0; j < spec.p; ++j) {
          worst = std::max(worst, std::abs(b[j] - classical_basis(kind, j, t)));
        }
      }
    }
    detail << "; theta=0 basis err " << sci(worst);
    if (!(worst <= kReductionTol)) failures.push_back("theta=0 reduction");
  }

  // Static, fixed-basis, sum-aggregated NASM is SNO.
  {
    op::NasmConfig nc;
    nc.basis.adaptive = false;
    nc.non_static_coef = false;
    op::OperatorConfig degenerate;
    degenerate.nasm = nc;
    const auto enc = op::identity_encoder(EnvId::Pendulum, false);
    const op::OperatorModel a(degenerate, enc, 1, 12);
    const op::OperatorModel b(op::make_sno_config(op::NasmConfig{}), enc, 1, 12);
    auto rng = core::make_stream(12, "acceptance/degeneracy");
    std::uniform_real_distribution<double> ue(-3.0, 3.0), ut(0.0, 1.0);
    Eigen::MatrixXd e(2, 1000);
    Eigen::VectorXd t(1000);
    for (int i = 0; i < 1000; ++i) {
      e(0, i) = ue(rng);
      e(1, i) = ue(rng);
      t[i] = ut(rng);
    }
    const bool same = bitwise_equal(a.params(), b.params()) &&
                      bitwise_equal(a.forward(e, t), b.forward(e, t));
    detail << "; SNO/NASM degeneracy " << (same ? "bit-identical" : "differs");
    if (!same) failures.push_back("degeneracy");
  }

  // Band-limited targets are reproduced exactly.
  {
    double worst = 0.0;
    auto rng = core::make_stream(11, "acceptance/band-limited");
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(257, 0.0, 1.0);
    for (op::BasisKind kind : {op::BasisKind::Fourier, op::BasisKind::Chebyshev}) {
      op::BasisSpec spec;
      spec.kind = kind;
      spec.adaptive = false;
      Eigen::VectorXd c(spec.p);
      for (int j = 0; j < spec.p; ++j) c[j] = uc(rng);
      Eigen::VectorXd oracle = Eigen::VectorXd::Zero(grid.size());
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        for (int j = 0; j < spec.p; ++j) oracle[i] += c[j] * classical_basis(kind, j, grid[i]);
      }
      const Eigen::VectorXd values = op::interpolate_band_limited(spec, c, grid);
      worst = std::max(worst, (values - oracle).cwiseAbs().maxCoeff());
      const Eigen::VectorXd refit =
          op::interpolate_band_limited(spec, op::fit_band_limited(spec, grid, oracle), grid);
      worst = std::max(worst, (refit - oracle).cwiseAbs().maxCoeff());
    }
    detail << "; band-limited reconstruction err " << sci(worst);
    if (!(worst <= kReconstructionTol)) failures.push_back("reconstruction");
  }

  // Fixed seed gives identical training.
  {
    auto rng = core::make_stream(5, "acceptance/determinism");
    std::uniform_real_distribution<double> ue(-1.0, 1.0), ut(0.0, 1.0);
    train::TrainingArrays data;
    const int n = 300;
    data.e.resize(2, n);
    data.t.resize(n);
    data.u.resize(1, n);
    for (int i = 0; i < n; ++i) {
      data.e(0, i) = ue(rng);
      data.e(1, i) = ue(rng);
      data.t[i] = ut(rng);
      data.u(0, i) = data.e(0, i) * std::sin(3.0 * data.t[i]) + data.e(1, i);
    }
    train::TrainConfig cfg;
    cfg.epochs = 50;
    cfg.max_batch = 64;
    cfg.seed = 5;
    bool same = true;
    for (auto kind : {op::OperatorKind::NASM, op::OperatorKind::DON}) {
      const auto enc = op::identity_encoder(EnvId::Pendulum, false);
      const auto mc = op::default_config(kind, EnvId::Pendulum, 2, 1);
      op::OperatorModel a(mc, enc, 1, 3), b(mc, enc, 1, 3);
      const auto ra = train::train(a, data, cfg);
      const auto rb = train::train(b, data, cfg);
      same = same && ra.train_loss.size() == rb.train_loss.size() &&
             std::memcmp(ra.train_loss.data(), rb.train_loss.data(),
                         sizeof(double) * ra.train_loss.size()) == 0 &&
             bitwise_equal(a.params(), b.params());
    }
    detail << "; training " << (same ? "bit-identical" : "not reproducible");
    if (!same) failures.push_back("determinism");
  }

  std::string prefix;
  if (!failures.empty()) {
    prefix = "failed:";
    for (const auto& f : failures) prefix += " " + f;
    prefix += "; ";
  }
  return {failures.empty(), prefix + detail.str()};
}

// Data pipeline determinism ----------------------------------------------------------

Outcome data_determinism(const fs::path& workdir) {
  solvers::DirectSolverConfig solver;
  const auto dist = datagen::make_distribution(EnvId::Pendulum, datagen::DistLabel::ID);
  const fs::path a = workdir / "det_run1_t1.jsonl", b = workdir / "det_run2_t1.jsonl",
                 c = workdir / "det_run3_t3.jsonl";
  datagen::write_dataset(a, datagen::generate_dataset(dist, 200, solver, 17, 10, 1));
  datagen::write_dataset(b, datagen::generate_dataset(dist, 200, solver, 17, 10, 1));
  datagen::write_dataset(c, datagen::generate_dataset(dist, 200, solver, 17, 10, 3));
  const std::string ba = file_bytes(a);
  const bool identical = !ba.empty() && ba == file_bytes(b) && ba == file_bytes(c);
  const std::string hash = core::hex64(core::fnv1a64(ba));

  // Quadrotor goal boxes on sampled and on generated instances.
  double id_lo = 1e9, id_hi = -1e9, ood_lo = 1e9, ood_hi = -1e9;
  const auto track = [](const Eigen::VectorXd& x, double& lo, double& hi) {
    lo = std::min(lo, x.minCoeff());
    hi = std::max(hi, x.maxCoeff());
  };
  const auto qid = datagen::make_distribution(EnvId::Quadrotor, datagen::DistLabel::ID);
  const auto qood = datagen::make_distribution(EnvId::Quadrotor, datagen::DistLabel::OOD);
  auto rng = core::make_stream(3, "acceptance/quadrotor-boxes");
  for (int i = 0; i < 10000; ++i) {
    track(datagen::sample_instance(qid, rng).cost.x_goal, id_lo, id_hi);
    track(datagen::sample_instance(qood, rng).cost.x_goal, ood_lo, ood_hi);
  }
  for (const auto& r : datagen::generate_benchmark(qid, 5, solver, 3).records) {
    track(r.inst.cost.x_goal, id_lo, id_hi);
  }
  for (const auto& r : datagen::generate_benchmark(qood, 5, solver, 3).records) {
    track(r.inst.cost.x_goal, ood_lo, ood_hi);
  }
  const bool boxes = id_lo >= 0.1 && id_hi <= 1.1 && ood_lo >= -0.1 && ood_hi <= 0.1;
  std::ostringstream d;
  d << std::setprecision(4) << "200-record dataset " << (identical ? "byte-identical" : "differs")
    << " across 2 runs and 1/3 threads (fnv " << hash << "); Quadrotor goals ID [" << id_lo
    << ", " << id_hi << "], OOD [" << ood_lo << ", " << ood_hi << "]";
  return {identical && boxes, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
  std::string workdir = "acceptance_work";
  std::vector<std::string> only;
  app.add_option("--workdir", workdir, "Directory for generated files")->capture_default_str();
  app.add_option("--only", only, "Run only these criteria (e.g. C1 C8)");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  Pendulum pendulum;
  const fs::path wd = workdir;
  const std::vector<Criterion> criteria = {
      {"C1", "gradient oracle", 60, gradient_oracle},
      {"C2", "brachistochrone analytic regression", 120, brachistochrone_regression},
      {"C3", "zermelo zero current", 300, zermelo_zero_current},
      {"C4", "pendulum end-to-end", 1800, [&] { return pendulum_end_to_end(pendulum, wd); }},
      {"C5", "baseline ordering", 1800, [&] { return baseline_ordering(pendulum); }},
      {"C6", "fine-tuning direction", 1800, [&] { return finetune_direction(pendulum, wd); }},
      {"C7", "speedup", 600, [&] { return speedup(pendulum); }},
      {"C8", "operator property suite", 300, operator_properties},
      {"C9", "data pipeline determinism", 600, [&] { return data_determinism(wd); }},
  };

  nlohmann::json summary = nlohmann::json::array();
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const double t0 = core::now_seconds();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = core::now_seconds() - t0;
    const bool in_budget = seconds < c.budget_seconds;
    if (!in_budget) o.detail += "; over the time budget";
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << " ["
         << std::fixed << std::setprecision(1) << seconds << " s / " << c.budget_seconds << " s]";
    std::cout << line.str() << std::endl;
    summary.push_back({{"id", c.id},
                       {"name", c.name},
                       {"pass", pass},
                       {"detail", o.detail},
                       {"seconds", seconds}});
  }
  std::ofstream(wd / "acceptance_summary.json") << summary.dump(1) << "\n";
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
