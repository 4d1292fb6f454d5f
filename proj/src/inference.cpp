#include "gridloc/inference.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gridloc {

namespace {

void check_position(int position) {
  if (position < 0 || position >= static_cast<int>(kNumPositions)) {
    throw std::out_of_range("sensor position " + std::to_string(position) +
                            " outside 0..24");
  }
}

}  // namespace

Classification classify(const SparseBinaryVector& location,
                        const ClassMemory& memory, std::size_t position) {
  Classification out;
  if (location.empty()) return out;
  for (int label : memory.labels()) {
    if (memory.within_class(label, position, location)) {
      out.matching.push_back(label);
    }
  }
  if (out.matching.size() == 1) {
    out.status = ClassifyStatus::Classified;
    out.label = out.matching.front();
  } else if (out.matching.size() > 1) {
    out.status = ClassifyStatus::Ambiguous;
  }
  return out;
}

std::vector<std::pair<int, std::size_t>> represented_examples(
    const SparseBinaryVector& location, const ClassMemory& memory,
    std::size_t position) {
  std::vector<std::pair<int, std::size_t>> out;
  for (int label : memory.labels()) {
    const auto codes = memory.codes(label, position);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (is_subset(codes[i], location)) out.emplace_back(label, i);
    }
  }
  return out;
}

bool is_single_representation(const SparseBinaryVector& location,
                              const ClassMemory& memory,
                              std::size_t position) {
  if (location.empty()) return false;
  for (int label : memory.labels()) {
    for (const auto& code : memory.codes(label, position)) {
      if (is_subset(location, code)) return true;
    }
  }
  return false;
}

std::string_view to_string(InferenceStatus status) {
  switch (status) {
    case InferenceStatus::Correct:
      return "correct";
    case InferenceStatus::WrongClass:
      return "wrong_class";
    case InferenceStatus::NoConvergence:
      return "no_convergence";
    case InferenceStatus::Ambiguous:
      return "ambiguous";
  }
  return "unknown";
}

std::vector<Index> FeaturePrediction::cells_in_column(
    Index column, const SensoryLayerShape& shape) const {
  std::vector<Index> out;
  for (Index c : cells) {
    if (shape.column_of(c) == column) out.push_back(c);
  }
  return out;
}

InferenceSession::InferenceSession(const Network& network)
    : network_(&network),
      location_(LocationRepresentation::empty(network.modules())) {}

StepRecord InferenceSession::step(Movement movement,
                                  const SparseBinaryVector& feature,
                                  int position) {
  check_position(position);
  const auto& params = network_->params();
  if (feature.dimension() != params.sensory.num_columns) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  if (feature.cardinality() != params.feature_active) {
    throw std::invalid_argument("feature must have " +
                                std::to_string(params.feature_active) +
                                " active columns");
  }

  // No location exists before the first sensation.
  LocationRepresentation moved =
      sensations_ == 0 ? location_
                       : location_.path_integrate(network_->modules(), movement);
  const auto moved_flat = moved.flatten();

  StepRecord record;
  record.position = position;
  // Predict from the moved location.
  record.predictive =
      network_->sensory().compute_predictive(moved_flat, params.theta_in);
  // Burst or inhibit against the sensed feature.
  record.active_sensory =
      activate(params.sensory, record.predictive, feature);
  // Recall locations from the active sensory cells.
  location_ = activate_from_sensory(network_->location_segments(),
                                    record.active_sensory, params.theta_loc,
                                    moved);

  record.classification = classify(location_.flatten(), network_->memory(),
                                   static_cast<std::size_t>(position));
  position_ = position;
  ++sensations_;
  return record;
}

StepRecord InferenceSession::sense(int position,
                                   const SparseBinaryVector& feature) {
  check_position(position);
  const Movement m =
      position_ ? movement_between(*position_, position) : Movement{};
  return step(m, feature, position);
}

FeaturePrediction InferenceSession::predict_feature_at(int target) const {
  check_position(target);
  if (!position_ || location_.empty()) {
    throw std::logic_error("prediction needs a non-empty location");
  }
  const auto moved = location_.path_integrate(
      network_->modules(), movement_between(*position_, target));
  const auto& params = network_->params();
  FeaturePrediction out;
  out.position = target;
  out.cells = network_->sensory().compute_predictive(moved.flatten(),
                                                     params.theta_in);
  out.columns = columns_of(params.sensory, out.cells);
  return out;
}

FeaturePrediction predict_feature_at(const InferenceSession& session,
                                     int target_position) {
  return session.predict_feature_at(target_position);
}

InferenceResult run_inference(const Network& network, const FeatureGrid& grid,
                              std::span<const int> order, int max_sensations,
                              const StepObserver& observer) {
  validate_order(order, false);
  const int limit =
      std::min(max_sensations, static_cast<int>(order.size()));

  InferenceSession session(network);
  InferenceResult result;
  for (int t = 0; t < limit; ++t) {
    const int position = order[static_cast<std::size_t>(t)];
    const auto record =
        session.sense(position, grid.at(static_cast<std::size_t>(position)));
    if (observer) observer(session, record);
    result.sensations_used = t + 1;

    const auto& c = record.classification;
    if (c.status == ClassifyStatus::Classified) {
      result.predicted_class = c.label;
      result.status = *c.label == grid.label ? InferenceStatus::Correct
                                             : InferenceStatus::WrongClass;
      return result;
    }
    if (c.status == ClassifyStatus::Ambiguous) {
      result.status = InferenceStatus::Ambiguous;
      return result;
    }
  }
  result.status = InferenceStatus::NoConvergence;
  return result;
}

}  // namespace gridloc
