#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridloc/sdr.hpp"

namespace gridloc {

using SegmentId = std::uint32_t;

/// Binary dendritic segments owned by the cells of one population, each a
/// synapse set over a presynaptic population.
///
/// Segments are append-only. An inverted index from presynaptic cell to the
/// segments that sample it keeps threshold evaluation proportional to the
/// number of active presynaptic cells.
class SegmentStore {
 public:
  SegmentStore() = default;
  SegmentStore(std::size_t num_cells, std::size_t presynaptic_dimension);

  std::size_t num_cells() const { return by_cell_.size(); }
  std::size_t presynaptic_dimension() const { return presynaptic_dimension_; }
  std::size_t num_segments() const { return owners_.size(); }

  SegmentId add_segment(Index cell, SparseBinaryVector synapses);

  // synapses := synapses | extra. Existing synapses are untouched.
  void grow_segment(SegmentId segment, const SparseBinaryVector& extra);

  std::span<const SegmentId> segments_of(Index cell) const;
  const SparseBinaryVector& synapses(SegmentId segment) const;
  Index owner(SegmentId segment) const { return owners_.at(segment); }

  /// Cells owning at least one segment whose overlap with `presynaptic`
  /// reaches `threshold`.
  SparseBinaryVector active_cells(const SparseBinaryVector& presynaptic,
                                  std::size_t threshold) const;

 private:
  std::size_t presynaptic_dimension_ = 0;
  std::vector<Index> owners_;
  std::vector<SparseBinaryVector> synapses_;
  std::vector<std::vector<SegmentId>> by_cell_;
  std::vector<std::vector<SegmentId>> by_presynaptic_;
};

}  // namespace gridloc
