#include "ncolab/core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "ncolab/core/error.hpp"
#include "ncolab/core/util.hpp"

namespace ncolab::core {

namespace {

std::string encode_le(std::span<const double> values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
  }
  return bytes;
}

}  // namespace

std::filesystem::path checkpoint_bin(const std::filesystem::path& stem) {
  auto p = stem;
  p += ".bin";
  return p;
}

std::filesystem::path checkpoint_json(const std::filesystem::path& stem) {
  auto p = stem;
  p += ".json";
  return p;
}

void write_f64_le(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string bytes = encode_le(values);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<double> read_f64_le(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) {
    throw SchemaError("'" + path.string() + "' size " + std::to_string(bytes.size()) +
                      " is not a multiple of 8");
  }
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b]))
              << (8 * b);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

void write_checkpoint(const std::filesystem::path& stem, std::span<const double> params,
                      nlohmann::json descriptor) {
  descriptor["num_params"] = params.size();
  descriptor["params_hash"] = hex64(fnv1a64(encode_le(params)));
  write_f64_le(checkpoint_bin(stem), params);
  std::ofstream out(checkpoint_json(stem), std::ios::trunc);
  if (!out) throw IoError("cannot open '" + checkpoint_json(stem).string() + "'");
  out << descriptor.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& stem) {
  Checkpoint ck;
  std::ifstream in(checkpoint_json(stem));
  if (!in) throw IoError("cannot open '" + checkpoint_json(stem).string() + "'");
  try {
    ck.descriptor = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("checkpoint descriptor: " + std::string(e.what()));
  }
  ck.params = read_f64_le(checkpoint_bin(stem));
  const auto expected = ck.descriptor.value("num_params", std::size_t{0});
  if (expected != ck.params.size()) {
    throw SchemaError("checkpoint holds " + std::to_string(ck.params.size()) +
                      " parameters, descriptor declares " + std::to_string(expected));
  }
  const std::string hash = hex64(fnv1a64(encode_le(ck.params)));
  if (ck.descriptor.value("params_hash", std::string{}) != hash) {
    throw SchemaError("checkpoint parameter hash " + hash + " does not match descriptor " +
                      ck.descriptor.value("params_hash", std::string{"<none>"}));
  }
  return ck;
}

}  // namespace ncolab::core
