#include "gridloc/learning.hpp"

#include <stdexcept>
#include <string>

namespace gridloc {

namespace {

void check_event(const LearningEvent& event, const Network& network) {
  const auto& shape = network.params().sensory;
  if (event.position < 0 ||
      event.position >= static_cast<int>(kNumPositions)) {
    throw std::invalid_argument("learning position out of range");
  }
  const auto& s = event.sensory_learn;
  if (s.dimension() != shape.num_cells() ||
      s.cardinality() != network.params().feature_active ||
      columns_of(shape, s).cardinality() != s.cardinality()) {
    throw std::invalid_argument(
        "sensory learning cells must be one cell in each of " +
        std::to_string(network.params().feature_active) + " columns");
  }
  const auto& l = event.location_code;
  if (l.dimension() != network.location_dimension() ||
      l.cardinality() != network.params().num_modules) {
    throw std::invalid_argument("location code must have one cell per module");
  }
  std::size_t module = 0;
  for (Index c : l) {
    if (c / network.cells_per_module() != module++) {
      throw std::invalid_argument(
          "location code must have one cell per module");
    }
  }
}

}  // namespace

SparseBinaryVector select_learning_cells(const SensoryLayerShape& shape,
                                         const SparseBinaryVector& input_columns,
                                         Rng& rng) {
  if (input_columns.dimension() != shape.num_columns) {
    throw std::invalid_argument("input column dimension mismatch");
  }
  std::uniform_int_distribution<std::size_t> pick(0,
                                                  shape.cells_per_column - 1);
  std::vector<Index> cells;
  cells.reserve(input_columns.cardinality());
  for (Index column : input_columns) {
    cells.push_back(shape.cell_at(column, pick(rng)));
  }
  return SparseBinaryVector::from_sorted_unchecked(shape.num_cells(),
                                                   std::move(cells));
}

AssociationSegments learn_association(const LearningEvent& event,
                                      Network& network) {
  check_event(event, network);
  AssociationSegments written;
  auto& location = network.location_segments();
  auto& sensory = network.sensory().segments();

  written.location_side.reserve(event.location_code.cardinality());
  for (Index cell : event.location_code) {
    const auto id = location.add_segment(
        cell, SparseBinaryVector(location.presynaptic_dimension()));
    location.grow_segment(id, event.sensory_learn);
    written.location_side.push_back(id);
  }
  written.sensory_side.reserve(event.sensory_learn.cardinality());
  for (Index cell : event.sensory_learn) {
    const auto id = sensory.add_segment(
        cell, SparseBinaryVector(sensory.presynaptic_dimension()));
    sensory.grow_segment(id, event.location_code);
    written.sensory_side.push_back(id);
  }
  return written;
}

void reinforce_association(const LearningEvent& event,
                           const AssociationSegments& segments,
                           Network& network) {
  check_event(event, network);
  for (SegmentId id : segments.location_side) {
    network.location_segments().grow_segment(id, event.sensory_learn);
  }
  for (SegmentId id : segments.sensory_side) {
    network.sensory().segments().grow_segment(id, event.location_code);
  }
}

LearnedObject learn_object_from(const FeatureGrid& grid,
                                std::span<const int> order,
                                const LocationRepresentation& start, Rng& rng,
                                Network& network) {
  validate_order(order, true);
  for (const auto& m : start.modules()) {
    if (m.mode() != LocationMode::Learning) {
      throw std::invalid_argument("learning requires a learning-mode location");
    }
  }

  LearnedObject object;
  object.label = grid.label;
  object.order.assign(order.begin(), order.end());
  object.location_codes.resize(kNumPositions);
  object.sensory_cells.resize(kNumPositions);

  // Learning cells are drawn per position in raster order, so the whole
  // model depends on the traversal only through net displacements.
  std::vector<SparseBinaryVector> learning_cells;
  learning_cells.reserve(kNumPositions);
  for (std::size_t p = 0; p < kNumPositions; ++p) {
    learning_cells.push_back(
        select_learning_cells(network.params().sensory, grid.at(p), rng));
  }

  // `start` is the location of position 0; the sensor moves from there to
  // the first position of the order.
  LocationRepresentation location = start;
  int previous = 0;
  for (int position : order) {
    if (position != previous) {
      location = location.path_integrate(network.modules(),
                                         movement_between(previous, position));
    }
    LearningEvent event;
    event.position = position;
    event.location_code = location.flatten();
    event.sensory_learn = learning_cells[static_cast<std::size_t>(position)];
    learn_association(event, network);

    const auto p = static_cast<std::size_t>(position);
    object.location_codes[p] = std::move(event.location_code);
    object.sensory_cells[p] = std::move(event.sensory_learn);
    previous = position;
  }
  return object;
}

LearnedObject learn_object(const FeatureGrid& grid, std::span<const int> order,
                           Rng& rng, Network& network) {
  validate_order(order, true);
  const auto start = random_init_location(network.modules(), rng);
  return learn_object_from(grid, order, start, rng, network);
}

const LearnedObject& train_example(const FeatureGrid& grid,
                                   std::span<const int> order, Rng& rng,
                                   Network& network) {
  auto object = learn_object(grid, order, rng, network);
  network.memory().add(object.label, object.location_codes);
  network.record(std::move(object));
  return network.learned().back();
}

void replay_learned(const LearnedObject& object, Network& network) {
  validate_order(object.order, true);
  if (object.location_codes.size() != kNumPositions ||
      object.sensory_cells.size() != kNumPositions) {
    throw std::invalid_argument("learned object must cover every position");
  }
  for (int position : object.order) {
    const auto p = static_cast<std::size_t>(position);
    learn_association(
        {position, object.sensory_cells[p], object.location_codes[p]},
        network);
  }
  network.memory().add(object.label, object.location_codes);
  network.record(object);
}

}  // namespace gridloc
