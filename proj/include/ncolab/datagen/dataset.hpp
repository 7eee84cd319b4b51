#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ncolab/datagen/distribution.hpp"
#include "ncolab/envs/env.hpp"
#include "ncolab/solvers/direct.hpp"

namespace ncolab::datagen {

inline constexpr int kSchemaVersion = 1;

/// First line of every dataset or benchmark file.
struct FileHeader {
  int schema_version = kSchemaVersion;
  std::string kind;  // "dataset" or "benchmark"
  envs::EnvId env = envs::EnvId::Pendulum;
  DistLabel label = DistLabel::ID;
  std::uint64_t seed = 0;
  std::string stream;
  std::string solver_hash;
  nlohmann::json solver_config;
  nlohmann::json distribution;
  std::size_t n_records = 0;
};

/// One supervision triplet (instance, t_j, u*(t_j)).
struct DatasetRecord {
  envs::OcpInstance inst;
  std::size_t instance_index = 0;
  double t = 0.0;
  Eigen::VectorXd u;
};

struct Dataset {
  FileHeader header;
  std::vector<DatasetRecord> records;
};

struct BenchmarkRecord {
  envs::OcpInstance inst;
  std::size_t instance_index = 0;
  double J_opt = 0.0;
};

struct Benchmark {
  FileHeader header;
  std::vector<BenchmarkRecord> records;
};

struct GenerationStats {
  std::size_t attempted = 0;
  std::size_t dropped = 0;
  std::vector<std::size_t> dropped_indices;
  double solve_seconds = 0.0;
};

std::string solver_hash(const solvers::DirectSolverConfig& cfg);

/// Grid value of a solved control at grid index k.
Eigen::VectorXd control_at_grid(const envs::OcpInstance& inst, const envs::ControlGrid& u, int k);

/// Samples instances with per-instance streams (seed, "dataset/<label>", i),
/// solves each with solve_direct, and emits n_queries records per solved
/// instance at distinct grid times drawn without replacement. Unconverged
/// instances are dropped; throws NumericalError when more than 10% of the
/// attempted instances are dropped. Output does not depend on `threads`.
Dataset generate_dataset(const DistributionSpec& dist, std::size_t target_size,
                         const solvers::DirectSolverConfig& cfg, std::uint64_t seed,
                         int n_queries = 10, int threads = 1, GenerationStats* stats = nullptr);

/// Same sampling with stream "benchmark/<label>"; stores J_opt. For
/// Brachistochrone J_opt is the analytic cycloid travel time.
Benchmark generate_benchmark(const DistributionSpec& dist, std::size_t n_instances,
                             const solvers::DirectSolverConfig& cfg, std::uint64_t seed,
                             int threads = 1, GenerationStats* stats = nullptr);

/// JSON-lines files: header line, then one record per line. Readers check the
/// schema and record invariants and report the offending line number.
void write_dataset(const std::filesystem::path& path, const Dataset& d);
Dataset read_dataset(const std::filesystem::path& path);
void write_benchmark(const std::filesystem::path& path, const Benchmark& b);
Benchmark read_benchmark(const std::filesystem::path& path);

/// Instances of a dataset in first-seen order.
std::vector<envs::OcpInstance> dataset_instances(const Dataset& d);

}  // namespace ncolab::datagen
