#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "modref/error.hpp"

namespace modref::nn {

struct TensorRecord {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;

  bool operator==(const TensorRecord&) const = default;
};

/// Checkpoint layout (all integers little-endian):
///   "MRCK" magic, u32 format version,
///   u32 config length + UTF-8 config blob (a JSON document),
///   u32 tensor count, then per tensor:
///     u32 name length + name bytes,
///     u32 rank + i32 dims,
///     u8 dtype (0 = float32),
///     raw float32 payload.
void save_checkpoint(const std::filesystem::path& path, const std::string& config_json,
                     std::span<const TensorRecord> tensors);

struct Checkpoint {
  std::string config_json;
  std::vector<TensorRecord> tensors;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace modref::nn
