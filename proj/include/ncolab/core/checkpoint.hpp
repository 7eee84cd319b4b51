#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace ncolab::core {

/// Raw parameter blob: consecutive IEEE-754 binary64 values, little-endian,
/// no header.
void write_f64_le(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f64_le(const std::filesystem::path& path);

/// A checkpoint is `<stem>.bin` (parameters) plus `<stem>.json` (descriptor).
/// The descriptor always carries "num_params" and "params_hash"; callers add
/// layer shapes, activation, architecture tag and seed.
void write_checkpoint(const std::filesystem::path& stem, std::span<const double> params,
                      nlohmann::json descriptor);

struct Checkpoint {
  std::vector<double> params;
  nlohmann::json descriptor;
};

/// Reads both files and verifies the parameter count and hash against the
/// descriptor.
Checkpoint read_checkpoint(const std::filesystem::path& stem);

std::filesystem::path checkpoint_bin(const std::filesystem::path& stem);
std::filesystem::path checkpoint_json(const std::filesystem::path& stem);

}  // namespace ncolab::core
