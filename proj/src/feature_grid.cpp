#include "gridloc/feature_grid.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace gridloc {

void validate(const FeatureGrid& grid) {
  if (grid.label < 0 || grid.label > 255) {
    throw std::invalid_argument("label out of range: " +
                                std::to_string(grid.label));
  }
  for (std::size_t p = 0; p < kNumPositions; ++p) {
    const auto& f = grid.features[p];
    if (f.dimension() != kFeatureDim) {
      throw std::invalid_argument("feature at position " + std::to_string(p) +
                                  " has dimension " +
                                  std::to_string(f.dimension()));
    }
    if (f.cardinality() != kFeatureActive) {
      throw std::invalid_argument("feature at position " + std::to_string(p) +
                                  " has " + std::to_string(f.cardinality()) +
                                  " active bits");
    }
  }
}

Order raster_order() {
  Order o(kNumPositions);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

void validate_order(std::span<const int> order, bool require_full) {
  std::array<bool, kNumPositions> seen{};
  for (int p : order) {
    if (p < 0 || p >= static_cast<int>(kNumPositions)) {
      throw std::invalid_argument("position out of range: " +
                                  std::to_string(p));
    }
    if (seen[static_cast<std::size_t>(p)]) {
      throw std::invalid_argument("position repeated in order: " +
                                  std::to_string(p));
    }
    seen[static_cast<std::size_t>(p)] = true;
  }
  if (require_full && order.size() != kNumPositions) {
    throw std::invalid_argument("order must visit all 25 positions");
  }
}

Movement movement_between(int from_position, int to_position) {
  const int side = static_cast<int>(kGridSide);
  return {static_cast<double>(to_position % side - from_position % side),
          static_cast<double>(to_position / side - from_position / side)};
}

}  // namespace gridloc
