#include "modref/dataio/flo.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace modref::dataio {

namespace {
constexpr float kFloMagic = 202021.25f;  // "PIEH" interpreted as float
}

void write_flo(const FlowField& flow, const std::filesystem::path& path) {
  if (flow.width <= 0 || flow.height <= 0)
    throw ValidationError("flow dimensions must be positive");
  if (flow.data.size() != flow.pixels() * 2)
    throw ValidationError("flow payload size does not match dimensions");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  int32_t w = flow.width, h = flow.height;
  out.write(reinterpret_cast<const char*>(&kFloMagic), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(flow.data.data()),
            static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path.string());
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  float magic = 0.0f;
  int32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&magic), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in) throw LengthError("truncated .flo header: " + path.string());
  if (magic != kFloMagic)
    throw FormatError("bad .flo magic in " + path.string());
  if (w <= 0 || h <= 0 || static_cast<int64_t>(w) * h > (1ll << 30))
    throw FormatError("implausible .flo dimensions in " + path.string());

  FlowField flow(w, h);
  in.read(reinterpret_cast<char*>(flow.data.data()),
          static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(flow.data.size() * sizeof(float)))
    throw LengthError("truncated .flo payload: " + path.string());
  return flow;
}

}  // namespace modref::dataio
