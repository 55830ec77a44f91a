#include "modref/dataio/pfm.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

namespace modref::dataio {

namespace {

void check_finite(const std::vector<float>& v, const std::filesystem::path& path) {
  for (float x : v)
    if (!std::isfinite(x))
      throw ValidationError("non-finite value in float map written to " + path.string());
}

void write_pfm_impl(const char* magic, int width, int height, int channels,
                    const std::vector<float>& data, const std::filesystem::path& path) {
  if (width <= 0 || height <= 0) throw ValidationError("map dimensions must be positive");
  check_finite(data, path);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << magic << "\n" << width << " " << height << "\n" << "-1.0" << "\n";

  // bottom-to-top row order
  const size_t row = static_cast<size_t>(width) * channels;
  for (int y = height - 1; y >= 0; --y)
    out.write(reinterpret_cast<const char*>(&data[row * y]),
              static_cast<std::streamsize>(row * sizeof(float)));
  if (!out) throw IoError("write failed: " + path.string());
}

struct PfmHeader {
  std::string magic;
  int width = 0, height = 0;
  double scale = 0.0;
};

// Header tokens are separated by single whitespace characters; the scale
// line is terminated by exactly one whitespace byte before the payload.
PfmHeader read_header(std::ifstream& in, const std::filesystem::path& path) {
  PfmHeader h;
  auto next_token = [&]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {  // comment to end of line
        while (in.get(c) && c != '\n') {
        }
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(c);
    }
    return tok;
  };
  h.magic = next_token();
  if (h.magic != "PF" && h.magic != "Pf")
    throw FormatError("unsupported PFM header '" + h.magic + "' in " + path.string());
  try {
    h.width = std::stoi(next_token());
    h.height = std::stoi(next_token());
    h.scale = std::stod(next_token());
  } catch (const std::exception&) {
    throw FormatError("malformed PFM header in " + path.string());
  }
  if (h.width <= 0 || h.height <= 0)
    throw FormatError("implausible PFM dimensions in " + path.string());
  if (h.scale >= 0.0)
    throw FormatError("big-endian PFM not supported: " + path.string());
  return h;
}

void read_payload(std::ifstream& in, int width, int height, int channels,
                  std::vector<float>& data, const std::filesystem::path& path) {
  const size_t row = static_cast<size_t>(width) * channels;
  for (int y = height - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(&data[row * y]),
            static_cast<std::streamsize>(row * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(row * sizeof(float)))
      throw LengthError("truncated PFM payload: " + path.string());
  }
}

}  // namespace

void write_pfm(const DepthMap& depth, const std::filesystem::path& path) {
  write_pfm_impl("Pf", depth.width, depth.height, 1, depth.data, path);
}

void write_pfm(const NormalMap& normals, const std::filesystem::path& path) {
  write_pfm_impl("PF", normals.width, normals.height, 3, normals.data, path);
}

DepthMap read_pfm_depth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  PfmHeader h = read_header(in, path);
  if (h.magic != "Pf")
    throw FormatError("expected grayscale PFM (Pf), got " + h.magic + ": " + path.string());
  DepthMap depth(h.width, h.height);
  read_payload(in, h.width, h.height, 1, depth.data, path);
  return depth;
}

NormalMap read_pfm_normals(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  PfmHeader h = read_header(in, path);
  if (h.magic != "PF")
    throw FormatError("expected color PFM (PF), got " + h.magic + ": " + path.string());
  NormalMap normals(h.width, h.height);
  read_payload(in, h.width, h.height, 3, normals.data, path);
  return normals;
}

}  // namespace modref::dataio
