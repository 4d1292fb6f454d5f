#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gridloc/grid_location.hpp"
#include "gridloc/sdr.hpp"

namespace gridloc {

inline constexpr std::size_t kGridSide = 5;
inline constexpr std::size_t kNumPositions = kGridSide * kGridSide;
inline constexpr std::size_t kFeatureDim = 128;
inline constexpr std::size_t kFeatureActive = 19;

enum class GridSource { Synthetic, Encoded };

/// A labelled 5x5 grid of sparse binary feature vectors. Position p sits at
/// column p % 5, row p / 5.
struct FeatureGrid {
  std::array<SparseBinaryVector, kNumPositions> features;
  int label = 0;
  GridSource source = GridSource::Encoded;

  const SparseBinaryVector& at(std::size_t position) const {
    return features.at(position);
  }

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;
};

/// Throws std::invalid_argument unless every cell is a 128-dim vector with
/// exactly 19 active bits and the label is in [0, 255].
void validate(const FeatureGrid& grid);

/// A traversal of grid positions.
using Order = std::vector<int>;

Order raster_order();

/// Throws unless the entries are distinct positions in [0, 25). With
/// `require_full` the order must visit all 25.
void validate_order(std::span<const int> order, bool require_full);

/// Sensor displacement (dcol, drow) in patch spacings.
Movement movement_between(int from_position, int to_position);

}  // namespace gridloc
