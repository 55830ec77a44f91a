#pragma once

#include <filesystem>

#include "modref/image.hpp"

namespace modref::dataio {

/// Middlebury .flo layout, little-endian throughout:
///   float32 202021.25 ("PIEH"), int32 width, int32 height,
///   then width*height interleaved (u,v) float32 pairs, row-major.
/// File size is exactly 12 + 8*W*H bytes.
void write_flo(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flo(const std::filesystem::path& path);

}  // namespace modref::dataio
