#include "gridloc/sensory_layer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gridloc {

SensoryLayer::SensoryLayer(SensoryLayerShape shape,
                           std::size_t location_dimension)
    : shape_(shape), segments_(shape.num_cells(), location_dimension) {}

SparseBinaryVector SensoryLayer::compute_predictive(
    const SparseBinaryVector& location, std::size_t theta_in) const {
  return segments_.active_cells(location, theta_in);
}

SparseBinaryVector activate(const SensoryLayerShape& shape,
                            const SparseBinaryVector& predictive,
                            const SparseBinaryVector& input_columns) {
  if (input_columns.dimension() != shape.num_columns) {
    throw std::invalid_argument(
        "input has dimension " + std::to_string(input_columns.dimension()) +
        ", expected " + std::to_string(shape.num_columns));
  }
  if (predictive.dimension() != shape.num_cells()) {
    throw std::invalid_argument("predictive vector dimension mismatch");
  }

  std::vector<Index> active;
  auto p = predictive.begin();
  for (Index column : input_columns) {
    const Index first = shape.cell_at(column, 0);
    const Index last = shape.cell_at(column + 1, 0);
    p = std::lower_bound(p, predictive.end(), first);
    auto q = p;
    while (q != predictive.end() && *q < last) ++q;
    if (q != p) {
      active.insert(active.end(), p, q);
    } else {
      for (Index c = first; c < last; ++c) active.push_back(c);
    }
    p = q;
  }
  return SparseBinaryVector::from_sorted_unchecked(shape.num_cells(),
                                                   std::move(active));
}

SparseBinaryVector columns_of(const SensoryLayerShape& shape,
                              const SparseBinaryVector& cells) {
  std::vector<Index> cols;
  for (Index c : cells) {
    const Index col = shape.column_of(c);
    if (cols.empty() || cols.back() != col) cols.push_back(col);
  }
  return SparseBinaryVector::from_sorted_unchecked(shape.num_columns,
                                                   std::move(cols));
}

}  // namespace gridloc
