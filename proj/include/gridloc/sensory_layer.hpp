#pragma once

#include <cstddef>

#include "gridloc/dendrites.hpp"
#include "gridloc/sdr.hpp"

namespace gridloc {

struct SensoryLayerShape {
  std::size_t num_columns = 128;
  std::size_t cells_per_column = 32;

  std::size_t num_cells() const { return num_columns * cells_per_column; }
  Index column_of(Index cell) const {
    return static_cast<Index>(cell / cells_per_column);
  }
  Index cell_at(Index column, std::size_t offset) const {
    return static_cast<Index>(column * cells_per_column + offset);
  }
};

/// Mini-columns of cells whose distal segments sample location activity.
class SensoryLayer {
 public:
  SensoryLayer() = default;
  SensoryLayer(SensoryLayerShape shape, std::size_t location_dimension);

  const SensoryLayerShape& shape() const { return shape_; }
  SegmentStore& segments() { return segments_; }
  const SegmentStore& segments() const { return segments_; }

  /// Cells with a segment whose overlap with the (flattened) location
  /// activity reaches theta_in.
  SparseBinaryVector compute_predictive(const SparseBinaryVector& location,
                                        std::size_t theta_in) const;

 private:
  SensoryLayerShape shape_;
  SegmentStore segments_;
};

/// Per input column: the predictive cells in it if there are any, otherwise
/// every cell in the column. Columns without input stay silent.
SparseBinaryVector activate(const SensoryLayerShape& shape,
                            const SparseBinaryVector& predictive,
                            const SparseBinaryVector& input_columns);

/// Columns containing at least one of `cells`.
SparseBinaryVector columns_of(const SensoryLayerShape& shape,
                              const SparseBinaryVector& cells);

}  // namespace gridloc
