#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridloc/class_memory.hpp"
#include "gridloc/dendrites.hpp"
#include "gridloc/feature_grid.hpp"
#include "gridloc/grid_location.hpp"
#include "gridloc/sensory_layer.hpp"

namespace gridloc {

struct NetworkParams {
  std::size_t num_modules = 40;
  std::size_t lattice_side = 50;
  SensoryLayerShape sensory{};
  std::size_t feature_active = kFeatureActive;
  // Sensory segments hold one cell per module, so 20 is a half-majority.
  std::size_t theta_in = 20;
  std::size_t theta_loc = 13;
  double min_scale = 1.0;
  double max_scale = 2.0;
};

/// One example as it was learned: its label, traversal order and, per
/// position, the location code and the sensory cells chosen for learning.
struct LearnedObject {
  int label = 0;
  Order order;
  std::vector<SparseBinaryVector> location_codes;  // [position], flattened
  std::vector<SparseBinaryVector> sensory_cells;   // [position]
};

/// The two-layer sensorimotor network: grid module geometry, reciprocal
/// dendritic segments between the layers and the class memory.
class Network {
 public:
  /// Draws module geometry from `seed`.
  Network(const NetworkParams& params, std::uint64_t seed);
  Network(const NetworkParams& params, std::vector<GridModuleConfig> modules);

  const NetworkParams& params() const { return params_; }
  void set_theta_in(std::size_t theta) { params_.theta_in = theta; }
  void set_theta_loc(std::size_t theta) { params_.theta_loc = theta; }

  std::span<const GridModuleConfig> modules() const { return modules_; }
  std::size_t cells_per_module() const {
    return params_.lattice_side * params_.lattice_side;
  }
  std::size_t location_dimension() const {
    return params_.num_modules * cells_per_module();
  }

  SensoryLayer& sensory() { return sensory_; }
  const SensoryLayer& sensory() const { return sensory_; }
  SegmentStore& location_segments() { return location_segments_; }
  const SegmentStore& location_segments() const { return location_segments_; }
  ClassMemory& memory() { return memory_; }
  const ClassMemory& memory() const { return memory_; }

  const std::vector<LearnedObject>& learned() const { return learned_; }
  void record(LearnedObject object) { learned_.push_back(std::move(object)); }

 private:
  NetworkParams params_;
  std::vector<GridModuleConfig> modules_;
  SensoryLayer sensory_;
  SegmentStore location_segments_;
  ClassMemory memory_;
  std::vector<LearnedObject> learned_;
};

}  // namespace gridloc
