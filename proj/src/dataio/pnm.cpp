#include "modref/dataio/pnm.hpp"

#include <cctype>
#include <fstream>
#include <string>

namespace modref::dataio {

namespace {

void write_pnm_impl(const char* magic, int width, int height, size_t channels,
                    const uint8_t* data, const std::filesystem::path& path) {
  if (width <= 0 || height <= 0) throw ValidationError("image dimensions must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << magic << "\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(static_cast<size_t>(width) * height * channels));
  if (!out) throw IoError("write failed: " + path.string());
}

struct PnmHeader {
  std::string magic;
  int width = 0, height = 0, maxval = 0;
};

PnmHeader read_header(std::ifstream& in, const std::filesystem::path& path) {
  auto next_token = [&]() {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
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
  PnmHeader h;
  h.magic = next_token();
  try {
    h.width = std::stoi(next_token());
    h.height = std::stoi(next_token());
    h.maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError("malformed PNM header in " + path.string());
  }
  if (h.width <= 0 || h.height <= 0)
    throw FormatError("implausible PNM dimensions in " + path.string());
  if (h.maxval != 255)
    throw FormatError("only maxval 255 PNM supported: " + path.string());
  return h;
}

void read_payload(std::ifstream& in, size_t bytes, uint8_t* data,
                  const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes))
    throw LengthError("truncated PNM payload: " + path.string());
}

}  // namespace

void write_pnm(const Rgb8Image& image, const std::filesystem::path& path) {
  write_pnm_impl("P6", image.width, image.height, 3, image.data.data(), path);
}

void write_pnm(const GrayImage& image, const std::filesystem::path& path) {
  write_pnm_impl("P5", image.width, image.height, 1, image.data.data(), path);
}

void write_pnm(const LabelMap& labels, const std::filesystem::path& path) {
  GrayImage g = to_gray(labels);  // throws RangeError on labels >= 256
  write_pnm(g, path);
}

Rgb8Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  PnmHeader h = read_header(in, path);
  if (h.magic != "P6") throw FormatError("expected P6, got " + h.magic + ": " + path.string());
  Rgb8Image img(h.width, h.height);
  read_payload(in, img.data.size(), img.data.data(), path);
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  PnmHeader h = read_header(in, path);
  if (h.magic != "P5") throw FormatError("expected P5, got " + h.magic + ": " + path.string());
  GrayImage img(h.width, h.height);
  read_payload(in, img.data.size(), img.data.data(), path);
  return img;
}

}  // namespace modref::dataio
