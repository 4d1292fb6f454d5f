#include "gridloc/grid_location.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gridloc {

namespace {

// Lattice-unit tolerance for deciding that a translated point sits exactly
// on a lattice line.
constexpr double kLatticeEpsilon = 1e-9;

double wrap_unit(double v) {
  double w = v - std::floor(v);
  return w >= 1.0 ? 0.0 : w;
}

Index wrap_index(long long i, std::size_t side) {
  const auto n = static_cast<long long>(side);
  return static_cast<Index>(((i % n) + n) % n);
}

// Lattice coordinates touched by a translated point along one axis.
void touched_coordinates(double u, std::size_t side, Index out[2],
                         int& count) {
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < kLatticeEpsilon) {
    out[0] = wrap_index(static_cast<long long>(nearest), side);
    count = 1;
    return;
  }
  const auto lo = static_cast<long long>(std::floor(u));
  out[0] = wrap_index(lo, side);
  out[1] = wrap_index(lo + 1, side);
  count = 2;
}

}  // namespace

void validate(const GridModuleConfig& config) {
  if (!(config.scale > 0.0) || !std::isfinite(config.scale)) {
    throw std::invalid_argument("grid module scale must be positive");
  }
  if (!(config.orientation >= 0.0 &&
        config.orientation < std::numbers::pi / 2)) {
    throw std::invalid_argument("grid module orientation must be in [0, pi/2)");
  }
  if (config.lattice_side == 0) {
    throw std::invalid_argument("grid module lattice side must be positive");
  }
}

std::vector<GridModuleConfig> sample_module_configs(std::size_t count,
                                                    std::size_t lattice_side,
                                                    double min_scale,
                                                    double max_scale,
                                                    Rng& rng) {
  if (!(min_scale > 0.0) || max_scale < min_scale) {
    throw std::invalid_argument("invalid grid module scale range");
  }
  std::uniform_real_distribution<double> log_scale(std::log(min_scale),
                                                   std::log(max_scale));
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
  std::vector<GridModuleConfig> configs;
  configs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GridModuleConfig c;
    c.scale = std::exp(log_scale(rng));
    c.orientation = angle(rng);
    c.lattice_side = lattice_side;
    validate(c);
    configs.push_back(c);
  }
  return configs;
}

PhaseShift movement_transform(const GridModuleConfig& config, Movement m) {
  const double c = std::cos(config.orientation);
  const double s = std::sin(config.orientation);
  return {(c * m.dx - s * m.dy) / config.scale,
          (s * m.dx + c * m.dy) / config.scale};
}

Phase wrap_phase(double x, double y) { return {wrap_unit(x), wrap_unit(y)}; }

Index phase_to_cell(Phase phase, std::size_t lattice_side) {
  const auto side = static_cast<double>(lattice_side);
  auto cx = static_cast<std::size_t>(std::floor(phase.x * side));
  auto cy = static_cast<std::size_t>(std::floor(phase.y * side));
  cx = std::min(cx, lattice_side - 1);
  cy = std::min(cy, lattice_side - 1);
  return static_cast<Index>(cy * lattice_side + cx);
}

ModuleState ModuleState::learning(std::vector<Phase> phases,
                                  std::size_t lattice_side) {
  ModuleState s;
  s.mode_ = LocationMode::Learning;
  s.lattice_side_ = lattice_side;
  s.phases_ = std::move(phases);
  s.cells_ = SparseBinaryVector(lattice_side * lattice_side);
  return s;
}

ModuleState ModuleState::inference(SparseBinaryVector cells) {
  const auto side = static_cast<std::size_t>(
      std::llround(std::sqrt(static_cast<double>(cells.dimension()))));
  if (side * side != cells.dimension()) {
    throw std::invalid_argument("module activity is not a square lattice");
  }
  ModuleState s;
  s.mode_ = LocationMode::Inference;
  s.lattice_side_ = side;
  s.cells_ = std::move(cells);
  return s;
}

SparseBinaryVector ModuleState::active_cells() const {
  if (mode_ == LocationMode::Inference) return cells_;
  std::vector<Index> cells;
  cells.reserve(phases_.size());
  for (const auto& p : phases_) cells.push_back(phase_to_cell(p, lattice_side_));
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return SparseBinaryVector::from_sorted_unchecked(
      lattice_side_ * lattice_side_, std::move(cells));
}

ModuleState path_integrate_learning(const ModuleState& state,
                                    const GridModuleConfig& config,
                                    Movement m) {
  if (state.mode() != LocationMode::Learning) {
    throw std::logic_error("learning path integration on an inference state");
  }
  if (state.phases().empty()) {
    throw std::logic_error("learning state has no phases");
  }
  const auto shift = movement_transform(config, m);
  std::vector<Phase> moved;
  moved.reserve(state.phases().size());
  for (const auto& p : state.phases()) {
    moved.push_back(wrap_phase(p.x + shift.dx, p.y + shift.dy));
  }
  return ModuleState::learning(std::move(moved), state.lattice_side());
}

ModuleState path_integrate_inference(const ModuleState& state,
                                     const GridModuleConfig& config,
                                     Movement m) {
  if (state.mode() != LocationMode::Inference) {
    throw std::logic_error("inference path integration on a learning state");
  }
  const std::size_t side = state.lattice_side();
  const auto shift = movement_transform(config, m);
  const double du = shift.dx * static_cast<double>(side);
  const double dv = shift.dy * static_cast<double>(side);

  std::vector<Index> out;
  const auto cells = state.active_cells();
  out.reserve(cells.cardinality() * 4);
  for (Index cell : cells) {
    const double cx = static_cast<double>(cell % side);
    const double cy = static_cast<double>(cell / side);
    Index xs[2];
    Index ys[2];
    int nx = 0;
    int ny = 0;
    touched_coordinates(cx + du, side, xs, nx);
    touched_coordinates(cy + dv, side, ys, ny);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        out.push_back(static_cast<Index>(ys[j] * side + xs[i]));
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return ModuleState::inference(
      SparseBinaryVector::from_sorted_unchecked(side * side, std::move(out)));
}

LocationRepresentation::LocationRepresentation(std::vector<ModuleState> modules)
    : modules_(std::move(modules)) {
  for (const auto& m : modules_) {
    if (m.lattice_side() != modules_.front().lattice_side()) {
      throw std::invalid_argument("modules must share one lattice size");
    }
  }
}

LocationRepresentation LocationRepresentation::empty(
    std::span<const GridModuleConfig> configs) {
  std::vector<ModuleState> modules;
  modules.reserve(configs.size());
  for (const auto& c : configs) {
    modules.push_back(ModuleState::inference(SparseBinaryVector(c.num_cells())));
  }
  return LocationRepresentation(std::move(modules));
}

LocationRepresentation LocationRepresentation::from_flat(
    std::span<const GridModuleConfig> configs, const SparseBinaryVector& flat) {
  if (configs.empty()) throw std::invalid_argument("no grid modules");
  const std::size_t per_module = configs.front().num_cells();
  if (flat.dimension() != per_module * configs.size()) {
    throw std::invalid_argument("flat location dimension mismatch");
  }
  std::vector<std::vector<Index>> cells(configs.size());
  for (Index i : flat) cells[i / per_module].push_back(i % per_module);
  std::vector<ModuleState> modules;
  modules.reserve(configs.size());
  for (auto& c : cells) {
    modules.push_back(ModuleState::inference(
        SparseBinaryVector::from_sorted_unchecked(per_module, std::move(c))));
  }
  return LocationRepresentation(std::move(modules));
}

std::vector<SparseBinaryVector> LocationRepresentation::snapshot() const {
  std::vector<SparseBinaryVector> out;
  out.reserve(modules_.size());
  for (const auto& m : modules_) out.push_back(m.active_cells());
  return out;
}

SparseBinaryVector LocationRepresentation::flatten() const {
  if (modules_.empty()) return {};
  const std::size_t per_module =
      modules_.front().lattice_side() * modules_.front().lattice_side();
  std::vector<Index> flat;
  for (std::size_t i = 0; i < modules_.size(); ++i) {
    const auto offset = static_cast<Index>(i * per_module);
    for (Index c : modules_[i].active_cells()) flat.push_back(offset + c);
  }
  return SparseBinaryVector::from_sorted_unchecked(
      per_module * modules_.size(), std::move(flat));
}

bool LocationRepresentation::empty() const {
  return std::all_of(modules_.begin(), modules_.end(), [](const auto& m) {
    return m.mode() == LocationMode::Learning ? m.phases().empty()
                                              : m.active_cells().empty();
  });
}

LocationRepresentation LocationRepresentation::path_integrate(
    std::span<const GridModuleConfig> configs, Movement m) const {
  if (configs.size() != modules_.size()) {
    throw std::invalid_argument("module count mismatch");
  }
  std::vector<ModuleState> moved;
  moved.reserve(modules_.size());
  for (std::size_t i = 0; i < modules_.size(); ++i) {
    moved.push_back(modules_[i].mode() == LocationMode::Learning
                        ? path_integrate_learning(modules_[i], configs[i], m)
                        : path_integrate_inference(modules_[i], configs[i], m));
  }
  return LocationRepresentation(std::move(moved));
}

LocationRepresentation random_init_location(
    std::span<const GridModuleConfig> configs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ModuleState> modules;
  modules.reserve(configs.size());
  for (const auto& c : configs) {
    const double x = unit(rng);
    const double y = unit(rng);
    modules.push_back(
        ModuleState::learning({wrap_phase(x, y)}, c.lattice_side));
  }
  return LocationRepresentation(std::move(modules));
}

LocationRepresentation activate_from_sensory(
    const SegmentStore& location_segments,
    const SparseBinaryVector& sensory_active, std::size_t theta_loc,
    const LocationRepresentation& fallback) {
  if (fallback.num_modules() == 0) {
    throw std::invalid_argument("fallback location has no modules");
  }
  const std::size_t per_module =
      fallback.module(0).lattice_side() * fallback.module(0).lattice_side();
  if (location_segments.num_cells() != per_module * fallback.num_modules()) {
    throw std::invalid_argument("location segment population mismatch");
  }
  const auto recalled =
      location_segments.active_cells(sensory_active, theta_loc);

  std::vector<std::vector<Index>> per(fallback.num_modules());
  for (Index i : recalled) per[i / per_module].push_back(i % per_module);

  std::vector<ModuleState> modules;
  modules.reserve(per.size());
  for (std::size_t i = 0; i < per.size(); ++i) {
    if (per[i].empty()) {
      modules.push_back(
          ModuleState::inference(fallback.module(i).active_cells()));
    } else {
      modules.push_back(ModuleState::inference(
          SparseBinaryVector::from_sorted_unchecked(per_module,
                                                    std::move(per[i]))));
    }
  }
  return LocationRepresentation(std::move(modules));
}

}  // namespace gridloc
