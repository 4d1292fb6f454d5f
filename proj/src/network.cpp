#include "gridloc/network.hpp"

#include <stdexcept>

namespace gridloc {

namespace {

std::vector<GridModuleConfig> draw_modules(const NetworkParams& params,
                                           std::uint64_t seed) {
  Rng rng(seed);
  return sample_module_configs(params.num_modules, params.lattice_side,
                               params.min_scale, params.max_scale, rng);
}

}  // namespace

Network::Network(const NetworkParams& params, std::uint64_t seed)
    : Network(params, draw_modules(params, seed)) {}

Network::Network(const NetworkParams& params,
                 std::vector<GridModuleConfig> modules)
    : params_(params), modules_(std::move(modules)) {
  if (modules_.size() != params_.num_modules || modules_.empty()) {
    throw std::invalid_argument("module count does not match parameters");
  }
  for (const auto& m : modules_) {
    validate(m);
    if (m.lattice_side != params_.lattice_side) {
      throw std::invalid_argument("module lattice side mismatch");
    }
  }
  if (params_.feature_active == 0 ||
      params_.feature_active > params_.sensory.num_columns) {
    throw std::invalid_argument("feature sparsity out of range");
  }
  sensory_ = SensoryLayer(params_.sensory, location_dimension());
  location_segments_ =
      SegmentStore(location_dimension(), params_.sensory.num_cells());
  memory_ = ClassMemory(params_.num_modules, cells_per_module(),
                        kNumPositions);
}

}  // namespace gridloc
