#pragma once

#include <filesystem>

#include "modref/image.hpp"

namespace modref::dataio {

/// Binary PNM: P6 (maxval 255) for RGB, P5 for 8-bit label/mask images.
/// Label maps are range-checked (< 256) at the serialization boundary.
void write_pnm(const Rgb8Image& image, const std::filesystem::path& path);
void write_pnm(const GrayImage& image, const std::filesystem::path& path);
void write_pnm(const LabelMap& labels, const std::filesystem::path& path);
Rgb8Image read_ppm(const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace modref::dataio
