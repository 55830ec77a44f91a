#pragma once

#include <filesystem>

#include "modref/image.hpp"

namespace modref::dataio {

/// PFM float maps: "Pf" (1 channel) for depth, "PF" (3 channels) for
/// normals. Scale line is -1.0 (little-endian). Rows are stored
/// bottom-to-top per the PFM convention. Payload is raw float32, so the
/// round-trip is lossless. Writers reject non-finite values.
void write_pfm(const DepthMap& depth, const std::filesystem::path& path);
void write_pfm(const NormalMap& normals, const std::filesystem::path& path);
DepthMap read_pfm_depth(const std::filesystem::path& path);
NormalMap read_pfm_normals(const std::filesystem::path& path);

}  // namespace modref::dataio
