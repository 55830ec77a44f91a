#include "modref/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace modref::nn {

namespace {

constexpr char kMagic[4] = {'M', 'R', 'C', 'K'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != sizeof(T)) throw LengthError("truncated checkpoint: " + path.string());
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::string& config_json,
                     std::span<const TensorRecord> tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  write_pod<uint32_t>(out, kFormatVersion);
  write_pod<uint32_t>(out, static_cast<uint32_t>(config_json.size()));
  out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));
  write_pod<uint32_t>(out, static_cast<uint32_t>(tensors.size()));
  for (const TensorRecord& t : tensors) {
    write_pod<uint32_t>(out, static_cast<uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod<uint32_t>(out, static_cast<uint32_t>(t.shape.size()));
    size_t count = 1;
    for (int d : t.shape) {
      write_pod<int32_t>(out, d);
      count *= static_cast<size_t>(d);
    }
    if (count != t.data.size())
      throw ValidationError("tensor '" + t.name + "' payload does not match shape");
    write_pod<uint8_t>(out, 0);  // float32
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad checkpoint magic: " + path.string());
  const uint32_t version = read_pod<uint32_t>(in, path);
  if (version != kFormatVersion)
    throw VersionError("checkpoint format version " + std::to_string(version) +
                       " != supported " + std::to_string(kFormatVersion));

  Checkpoint ckpt;
  const uint32_t config_len = read_pod<uint32_t>(in, path);
  ckpt.config_json.resize(config_len);
  in.read(ckpt.config_json.data(), config_len);
  if (in.gcount() != static_cast<std::streamsize>(config_len))
    throw LengthError("truncated checkpoint config: " + path.string());

  const uint32_t count = read_pod<uint32_t>(in, path);
  ckpt.tensors.resize(count);
  for (TensorRecord& t : ckpt.tensors) {
    const uint32_t name_len = read_pod<uint32_t>(in, path);
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const uint32_t rank = read_pod<uint32_t>(in, path);
    if (rank > 8) throw FormatError("implausible tensor rank in " + path.string());
    size_t elems = 1;
    t.shape.resize(rank);
    for (uint32_t i = 0; i < rank; ++i) {
      t.shape[i] = read_pod<int32_t>(in, path);
      if (t.shape[i] <= 0) throw FormatError("non-positive dim in " + path.string());
      elems *= static_cast<size_t>(t.shape[i]);
    }
    const uint8_t dtype = read_pod<uint8_t>(in, path);
    if (dtype != 0) throw FormatError("unsupported dtype in " + path.string());
    t.data.resize(elems);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(elems * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(elems * sizeof(float)))
      throw LengthError("truncated tensor payload: " + path.string());
  }
  return ckpt;
}

}  // namespace modref::nn
