#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gridloc/network.hpp"

namespace gridloc {

// Model snapshot, little-endian:
//   "GLMD" | u16 version=1
//   u32 num_modules, lattice_side, num_columns, cells_per_column,
//       feature_active, theta_in, theta_loc | f64 min_scale, max_scale
//   per module: f64 scale, f64 orientation
//   u32 object count, then per object:
//     u8 label | 25 x u8 order | per position: num_modules x u32 location
//     cell (flattened) and feature_active x u32 sensory cell
//
// Segments and class memory are rebuilt on load by replaying the objects.
inline constexpr std::uint16_t kModelVersion = 1;

std::vector<std::uint8_t> encode_model(const Network& network);
Network decode_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const Network& network);
Network load_model(const std::filesystem::path& path);

}  // namespace gridloc
