#include "ncolab/datagen/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <thread>
#include <unordered_set>

#include "ncolab/core/error.hpp"
#include "ncolab/core/util.hpp"
#include "ncolab/solvers/brachistochrone.hpp"

namespace ncolab::datagen {

namespace {

struct Solved {
  envs::OcpInstance inst;
  std::optional<solvers::Solution> sol;
};

/// Solves instances [first, first + count) of a stream, each drawn from its
/// own generator, across `threads` workers.
std::vector<Solved> solve_range(const DistributionSpec& dist,
                                const solvers::DirectSolverConfig& cfg, std::uint64_t seed,
                                const std::string& stream, std::size_t first, std::size_t count,
                                int threads) {
  std::vector<Solved> out(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      auto rng = core::make_stream(seed, stream, first + i);
      out[i].inst = sample_instance(dist, rng);
      try {
        auto sol = solvers::solve_direct(out[i].inst, cfg);
        if (sol.converged) out[i].sol = std::move(sol);
      } catch (const NumericalError&) {
      } catch (const DomainError&) {
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

/// Solves instances in index order until `needed` have converged.
std::vector<std::pair<std::size_t, Solved>> solve_until(const DistributionSpec& dist,
                                                        const solvers::DirectSolverConfig& cfg,
                                                        std::uint64_t seed,
                                                        const std::string& stream,
                                                        std::size_t needed, int threads,
                                                        GenerationStats& stats) {
  std::vector<std::pair<std::size_t, Solved>> kept;
  std::size_t next = 0;
  const std::size_t max_attempts = 2 * needed + 10;
  while (kept.size() < needed && next < max_attempts) {
    const std::size_t count = needed - kept.size();
    auto batch = solve_range(dist, cfg, seed, stream, next, count, threads);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++stats.attempted;
      if (batch[i].sol) {
        stats.solve_seconds += batch[i].sol->wall_time_seconds;
        kept.emplace_back(next + i, std::move(batch[i]));
      } else {
        ++stats.dropped;
        stats.dropped_indices.push_back(next + i);
      }
    }
    next += count;
  }
  if (kept.size() < needed || 10 * stats.dropped > stats.attempted) {
    throw NumericalError("solver dropped " + std::to_string(stats.dropped) + " of " +
                         std::to_string(stats.attempted) +
                         " instances, above the 10% drop limit");
  }
  return kept;
}

FileHeader make_header(const std::string& kind, const DistributionSpec& dist,
                       const solvers::DirectSolverConfig& cfg, std::uint64_t seed,
                       const std::string& stream) {
  FileHeader h;
  h.kind = kind;
  h.env = dist.base.env.id;
  h.label = dist.label;
  h.seed = seed;
  h.stream = stream;
  h.solver_hash = solver_hash(cfg);
  h.solver_config = cfg.to_json();
  h.distribution = distribution_to_json(dist);
  return h;
}

std::vector<int> draw_queries(int n_grid, int n_queries, std::mt19937_64& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n_grid));
  for (int k = 0; k < n_grid; ++k) idx[static_cast<std::size_t>(k)] = k;
  for (int i = 0; i < n_queries; ++i) {
    std::uniform_int_distribution<int> pick(i, n_grid - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(n_queries));
  std::sort(idx.begin(), idx.end());
  return idx;
}

nlohmann::json header_json(const FileHeader& h) {
  return {{"schema_version", h.schema_version},
          {"kind", h.kind},
          {"env", envs::to_string(h.env)},
          {"dist", to_string(h.label)},
          {"seed", h.seed},
          {"stream", h.stream},
          {"solver_hash", h.solver_hash},
          {"solver_config", h.solver_config},
          {"distribution", h.distribution},
          {"n_records", h.n_records}};
}

FileHeader header_from(const nlohmann::json& j, const std::string& kind) {
  FileHeader h;
  h.schema_version = j.at("schema_version").get<int>();
  if (h.schema_version != kSchemaVersion) {
    throw SchemaError("schema version " + std::to_string(h.schema_version) + ", expected " +
                      std::to_string(kSchemaVersion));
  }
  h.kind = j.at("kind").get<std::string>();
  if (h.kind != kind) throw SchemaError("file holds a " + h.kind + ", expected a " + kind);
  h.env = envs::env_from_string(j.at("env").get<std::string>());
  h.label = dist_label_from_string(j.at("dist").get<std::string>());
  h.seed = j.at("seed").get<std::uint64_t>();
  h.stream = j.at("stream").get<std::string>();
  h.solver_hash = j.at("solver_hash").get<std::string>();
  h.solver_config = j.at("solver_config");
  h.distribution = j.at("distribution");
  h.n_records = j.at("n_records").get<std::size_t>();
  return h;
}

std::vector<double> vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void write_lines(const std::filesystem::path& path, const nlohmann::json& header,
                 const std::vector<nlohmann::json>& lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << header.dump() << '\n';
  for (const auto& l : lines) out << l.dump() << '\n';
  if (!out) throw IoError("write to " + path.string() + " failed");
}

/// Calls fn(line_number, json) for every non-empty line after the header.
template <class Fn>
nlohmann::json read_lines(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  nlohmann::json header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (header.is_null()) {
        header = j;
      } else {
        fn(line_no, j);
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw SchemaError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (header.is_null()) throw SchemaError(path.string() + " has no header line");
  return header;
}

void check_env(const FileHeader& h, const envs::OcpInstance& inst) {
  if (inst.env.id != h.env) {
    throw SchemaError("record env " + envs::to_string(inst.env.id) + " differs from header env " +
                      envs::to_string(h.env));
  }
}

}  // namespace

std::string solver_hash(const solvers::DirectSolverConfig& cfg) {
  return core::hex64(core::fnv1a64(cfg.to_json().dump()));
}

Eigen::VectorXd control_at_grid(const envs::OcpInstance& inst, const envs::ControlGrid& u,
                                int k) {
  if (k < 0 || k >= inst.n_grid) throw DimensionError("grid index out of range");
  if (u.n_knots() == inst.n_grid) return u.values.row(k).transpose();
  const int interval = std::min(k, inst.n_grid - 2);
  return u.values.row(envs::knot_for_interval(u.n_knots(), inst.n_grid, interval)).transpose();
}

Dataset generate_dataset(const DistributionSpec& dist, std::size_t target_size,
                         const solvers::DirectSolverConfig& cfg, std::uint64_t seed,
                         int n_queries, int threads, GenerationStats* stats) {
  dist.validate();
  cfg.validate();
  if (n_queries < 1 || n_queries > dist.base.n_grid) {
    throw ConfigError("n_queries must lie in [1, " + std::to_string(dist.base.n_grid) + "]");
  }
  if (target_size == 0) throw ConfigError("dataset size must be positive");
  const std::string stream = "dataset/" + to_string(dist.label);
  const auto q = static_cast<std::size_t>(n_queries);
  const std::size_t needed = (target_size + q - 1) / q;
  GenerationStats local;
  GenerationStats& st = stats ? *stats : local;
  st = GenerationStats{};
  const auto solved = solve_until(dist, cfg, seed, stream, needed, threads, st);

  Dataset d;
  d.header = make_header("dataset", dist, cfg, seed, stream);
  for (const auto& [index, s] : solved) {
    auto rng = core::make_stream(seed, stream + "/queries", index);
    for (int k : draw_queries(s.inst.n_grid, n_queries, rng)) {
      if (d.records.size() == target_size) break;
      d.records.push_back(DatasetRecord{s.inst, index, k * s.inst.dt(),
                                        control_at_grid(s.inst, s.sol->u_star, k)});
    }
  }
  d.header.n_records = d.records.size();
  return d;
}

Benchmark generate_benchmark(const DistributionSpec& dist, std::size_t n_instances,
                             const solvers::DirectSolverConfig& cfg, std::uint64_t seed,
                             int threads, GenerationStats* stats) {
  dist.validate();
  cfg.validate();
  if (n_instances == 0) throw ConfigError("benchmark size must be positive");
  const std::string stream = "benchmark/" + to_string(dist.label);
  GenerationStats local;
  GenerationStats& st = stats ? *stats : local;
  st = GenerationStats{};
  const auto solved = solve_until(dist, cfg, seed, stream, n_instances, threads, st);

  Benchmark b;
  b.header = make_header("benchmark", dist, cfg, seed, stream);
  for (const auto& [index, s] : solved) {
    double j = s.sol->J;
    if (s.inst.env.id == envs::EnvId::Brachistochrone) {
      const double x1 = s.inst.env.constant("x1");
      const double x2 = s.inst.env.constant("x2");
      j = solvers::brachistochrone_analytic(s.inst.x_init[0], x1, x2, s.inst.cost.x_goal[0],
                                            s.inst.env.constant("g"))
              .T;
    }
    b.records.push_back(BenchmarkRecord{s.inst, index, j});
  }
  b.header.n_records = b.records.size();
  return b;
}

void write_dataset(const std::filesystem::path& path, const Dataset& d) {
  std::vector<nlohmann::json> lines;
  lines.reserve(d.records.size());
  for (const auto& r : d.records) {
    lines.push_back({{"instance", envs::instance_to_json(r.inst)},
                     {"index", r.instance_index},
                     {"t", r.t},
                     {"u", vec(r.u)}});
  }
  FileHeader h = d.header;
  h.n_records = d.records.size();
  write_lines(path, header_json(h), lines);
}

Dataset read_dataset(const std::filesystem::path& path) {
  Dataset d;
  std::vector<nlohmann::json> raw;
  std::vector<std::size_t> line_nos;
  const auto header = read_lines(path, [&](std::size_t line_no, const nlohmann::json& j) {
    raw.push_back(j);
    line_nos.push_back(line_no);
  });
  try {
    d.header = header_from(header, "dataset");
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + " line 1: " + e.what());
  } catch (const Error& e) {
    throw SchemaError(path.string() + " line 1: " + e.what());
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& j = raw[i];
    const std::string where = path.string() + " line " + std::to_string(line_nos[i]) + ": ";
    try {
      DatasetRecord r;
      r.inst = envs::instance_from_json(j.at("instance"));
      r.instance_index = j.at("index").get<std::size_t>();
      r.t = j.at("t").get<double>();
      const auto u = j.at("u").get<std::vector<double>>();
      r.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
      check_env(d.header, r.inst);
      if (!std::isfinite(r.t) || r.t < 0.0 || r.t > r.inst.tf * (1.0 + 1e-12)) {
        throw SchemaError("query time outside [0, tf]");
      }
      if (r.u.size() != r.inst.env.d_u || !r.u.allFinite()) {
        throw SchemaError("u_star must hold " + std::to_string(r.inst.env.d_u) + " finite values");
      }
      d.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + e.what());
    } catch (const Error& e) {
      throw SchemaError(where + e.what());
    }
  }
  if (d.records.size() != d.header.n_records) {
    throw SchemaError(path.string() + ": header announces " + std::to_string(d.header.n_records) +
                      " records, file holds " + std::to_string(d.records.size()));
  }
  return d;
}

void write_benchmark(const std::filesystem::path& path, const Benchmark& b) {
  std::vector<nlohmann::json> lines;
  lines.reserve(b.records.size());
  for (const auto& r : b.records) {
    lines.push_back({{"instance", envs::instance_to_json(r.inst)},
                     {"index", r.instance_index},
                     {"J_opt", r.J_opt}});
  }
  FileHeader h = b.header;
  h.n_records = b.records.size();
  write_lines(path, header_json(h), lines);
}

Benchmark read_benchmark(const std::filesystem::path& path) {
  Benchmark b;
  std::vector<nlohmann::json> raw;
  std::vector<std::size_t> line_nos;
  const auto header = read_lines(path, [&](std::size_t line_no, const nlohmann::json& j) {
    raw.push_back(j);
    line_nos.push_back(line_no);
  });
  try {
    b.header = header_from(header, "benchmark");
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + " line 1: " + e.what());
  } catch (const Error& e) {
    throw SchemaError(path.string() + " line 1: " + e.what());
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& j = raw[i];
    const std::string where = path.string() + " line " + std::to_string(line_nos[i]) + ": ";
    try {
      BenchmarkRecord r;
      r.inst = envs::instance_from_json(j.at("instance"));
      r.instance_index = j.at("index").get<std::size_t>();
      r.J_opt = j.at("J_opt").get<double>();
      check_env(b.header, r.inst);
      if (!std::isfinite(r.J_opt) || !(r.J_opt > 0.0)) {
        throw SchemaError("J_opt must be positive and finite");
      }
      b.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + e.what());
    } catch (const Error& e) {
      throw SchemaError(where + e.what());
    }
  }
  if (b.records.size() != b.header.n_records) {
    throw SchemaError(path.string() + ": header announces " + std::to_string(b.header.n_records) +
                      " records, file holds " + std::to_string(b.records.size()));
  }
  return b;
}

std::vector<envs::OcpInstance> dataset_instances(const Dataset& d) {
  std::vector<envs::OcpInstance> out;
  std::unordered_set<std::size_t> seen;
  for (const auto& r : d.records) {
    if (seen.insert(r.instance_index).second) out.push_back(r.inst);
  }
  return out;
}

}  // namespace ncolab::datagen
