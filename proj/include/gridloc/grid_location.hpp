#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridloc/dendrites.hpp"
#include "gridloc/sdr.hpp"

namespace gridloc {

/// Scale (in patch spacings per lattice period) and orientation of one grid
/// cell module. Orientation lives in [0, pi/2) because the lattice is square.
struct GridModuleConfig {
  double scale = 1.0;
  double orientation = 0.0;
  std::size_t lattice_side = 50;

  std::size_t num_cells() const { return lattice_side * lattice_side; }
};

void validate(const GridModuleConfig& config);

/// Scales log-uniform in [min_scale, max_scale], orientations uniform in
/// [0, pi/2).
std::vector<GridModuleConfig> sample_module_configs(std::size_t count,
                                                    std::size_t lattice_side,
                                                    double min_scale,
                                                    double max_scale, Rng& rng);

/// Position on the module torus, both coordinates in [0, 1).
struct Phase {
  double x = 0.0;
  double y = 0.0;
};

/// Sensor displacement between two sensations, in patch spacings.
struct Movement {
  double dx = 0.0;
  double dy = 0.0;
};

struct PhaseShift {
  double dx = 0.0;
  double dy = 0.0;
};

/// (1/scale) * R(orientation) * movement.
PhaseShift movement_transform(const GridModuleConfig& config, Movement m);

Phase wrap_phase(double x, double y);

/// floor(phase * side) per axis, row-major cell index.
Index phase_to_cell(Phase phase, std::size_t lattice_side);

enum class LocationMode { Learning, Inference };

/// Activity of one module. Learning mode tracks exact phases; inference mode
/// tracks a set of active lattice cells.
class ModuleState {
 public:
  static ModuleState learning(std::vector<Phase> phases,
                              std::size_t lattice_side);
  static ModuleState inference(SparseBinaryVector cells);

  LocationMode mode() const { return mode_; }
  std::size_t lattice_side() const { return lattice_side_; }
  std::span<const Phase> phases() const { return phases_; }

  // Learning mode: quantized phases. Inference mode: the stored cells.
  SparseBinaryVector active_cells() const;

 private:
  LocationMode mode_ = LocationMode::Inference;
  std::size_t lattice_side_ = 0;
  std::vector<Phase> phases_;
  SparseBinaryVector cells_;
};

ModuleState path_integrate_learning(const ModuleState& state,
                                    const GridModuleConfig& config, Movement m);

/// Each active cell sits at its lattice point; after translation the point
/// activates every cell at the corners of the lattice square containing it
/// (4 generically, 2 on an edge, 1 on a lattice point).
ModuleState path_integrate_inference(const ModuleState& state,
                                     const GridModuleConfig& config,
                                     Movement m);

/// The joint activity of all grid cell modules.
class LocationRepresentation {
 public:
  LocationRepresentation() = default;
  explicit LocationRepresentation(std::vector<ModuleState> modules);

  static LocationRepresentation empty(std::span<const GridModuleConfig> configs);
  static LocationRepresentation from_flat(std::span<const GridModuleConfig> configs,
                                          const SparseBinaryVector& flat);

  std::size_t num_modules() const { return modules_.size(); }
  const ModuleState& module(std::size_t i) const { return modules_.at(i); }
  std::span<const ModuleState> modules() const { return modules_; }

  std::vector<SparseBinaryVector> snapshot() const;
  /// Cell c of module i maps to i * cells_per_module + c.
  SparseBinaryVector flatten() const;
  bool empty() const;

  LocationRepresentation path_integrate(std::span<const GridModuleConfig> configs,
                                        Movement m) const;

 private:
  std::vector<ModuleState> modules_;
};

/// One uniformly random phase per module, in learning mode.
LocationRepresentation random_init_location(
    std::span<const GridModuleConfig> configs, Rng& rng);

/// Sensory-driven recall: per module, cells with a segment reaching
/// theta_loc against the sensory activity; modules with no such cell keep
/// their movement-driven activity from `fallback`.
LocationRepresentation activate_from_sensory(
    const SegmentStore& location_segments,
    const SparseBinaryVector& sensory_active, std::size_t theta_loc,
    const LocationRepresentation& fallback);

}  // namespace gridloc
