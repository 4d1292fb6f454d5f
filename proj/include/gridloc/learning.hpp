#pragma once

#include <span>
#include <vector>

#include "gridloc/network.hpp"

namespace gridloc {

/// One feature-location pairing to be stored.
struct LearningEvent {
  int position = 0;
  SparseBinaryVector sensory_learn;  // one cell per input column
  SparseBinaryVector location_code;  // flattened, one cell per module
};

/// Segments written by one association, so it can be re-applied.
struct AssociationSegments {
  std::vector<SegmentId> location_side;
  std::vector<SegmentId> sensory_side;
};

/// One uniformly chosen cell in every input column.
SparseBinaryVector select_learning_cells(const SensoryLayerShape& shape,
                                         const SparseBinaryVector& input_columns,
                                         Rng& rng);

/// Reciprocal binding: every location cell in the code grows a fresh segment
/// onto the sensory cells, and every sensory cell a fresh segment onto the
/// location code.
AssociationSegments learn_association(const LearningEvent& event,
                                      Network& network);

/// OR-applies the event onto previously written segments. Synapses that
/// already exist are unaffected, so repeating an association is a no-op.
void reinforce_association(const LearningEvent& event,
                           const AssociationSegments& segments,
                           Network& network);

/// Single pass over an object: random location init, then for each position
/// in `order` path-integrate, pick learning cells and associate. Does not
/// touch the class memory.
LearnedObject learn_object(const FeatureGrid& grid, std::span<const int> order,
                           Rng& rng, Network& network);

/// Same as learn_object with `start`, a learning-mode location, as the
/// object's location at position 0 instead of a random one.
LearnedObject learn_object_from(const FeatureGrid& grid,
                                std::span<const int> order,
                                const LocationRepresentation& start, Rng& rng,
                                Network& network);

/// learn_object, then store the codes in the class memory and record the
/// object on the network.
const LearnedObject& train_example(const FeatureGrid& grid,
                                   std::span<const int> order, Rng& rng,
                                   Network& network);

/// Rebuilds segments and class memory from a recorded object.
void replay_learned(const LearnedObject& object, Network& network);

}  // namespace gridloc
