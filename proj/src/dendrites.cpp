#include "gridloc/dendrites.hpp"

#include <algorithm>
#include <stdexcept>

namespace gridloc {

SegmentStore::SegmentStore(std::size_t num_cells,
                           std::size_t presynaptic_dimension)
    : presynaptic_dimension_(presynaptic_dimension),
      by_cell_(num_cells),
      by_presynaptic_(presynaptic_dimension) {}

SegmentId SegmentStore::add_segment(Index cell, SparseBinaryVector synapses) {
  if (cell >= by_cell_.size()) {
    throw std::out_of_range("segment owner cell out of range");
  }
  if (synapses.dimension() != presynaptic_dimension_) {
    throw std::invalid_argument("segment synapse dimension mismatch");
  }
  const auto id = static_cast<SegmentId>(owners_.size());
  for (Index pre : synapses) by_presynaptic_[pre].push_back(id);
  owners_.push_back(cell);
  synapses_.push_back(std::move(synapses));
  by_cell_[cell].push_back(id);
  return id;
}

void SegmentStore::grow_segment(SegmentId segment,
                                const SparseBinaryVector& extra) {
  const auto& current = synapses_.at(segment);
  auto grown = set_union(current, extra);
  if (grown.cardinality() == current.cardinality()) return;
  for (Index pre : extra) {
    if (!current.contains(pre)) by_presynaptic_[pre].push_back(segment);
  }
  synapses_[segment] = std::move(grown);
}

std::span<const SegmentId> SegmentStore::segments_of(Index cell) const {
  return by_cell_.at(cell);
}

const SparseBinaryVector& SegmentStore::synapses(SegmentId segment) const {
  return synapses_.at(segment);
}

SparseBinaryVector SegmentStore::active_cells(
    const SparseBinaryVector& presynaptic, std::size_t threshold) const {
  if (presynaptic.dimension() != presynaptic_dimension_) {
    throw std::invalid_argument("presynaptic activity dimension mismatch");
  }
  std::vector<Index> cells;
  if (threshold == 0) {
    for (Index c = 0; c < by_cell_.size(); ++c) {
      if (!by_cell_[c].empty()) cells.push_back(c);
    }
    return SparseBinaryVector::from_sorted_unchecked(num_cells(),
                                                     std::move(cells));
  }

  std::vector<std::uint32_t> counts(owners_.size(), 0);
  for (Index pre : presynaptic) {
    for (SegmentId s : by_presynaptic_[pre]) {
      if (++counts[s] == threshold) cells.push_back(owners_[s]);
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return SparseBinaryVector::from_sorted_unchecked(num_cells(),
                                                   std::move(cells));
}

}  // namespace gridloc
