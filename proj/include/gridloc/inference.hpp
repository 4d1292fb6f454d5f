#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridloc/network.hpp"

namespace gridloc {

enum class ClassifyStatus { Classified, Continue, Ambiguous };

struct Classification {
  ClassifyStatus status = ClassifyStatus::Continue;
  std::optional<int> label;   // set iff status == Classified
  std::vector<int> matching;  // classes whose union at m contains the activity
};

/// p(y) = 1 iff the activity lies within class y's union at `position` and
/// within no other class's. An empty activity never classifies.
Classification classify(const SparseBinaryVector& location,
                        const ClassMemory& memory, std::size_t position);

/// Learned examples (label, index) whose stored code at `position` is
/// wholly contained in `location`.
std::vector<std::pair<int, std::size_t>> represented_examples(
    const SparseBinaryVector& location, const ClassMemory& memory,
    std::size_t position);

/// True when `location` lies within a single stored code at `position`
/// rather than spanning a union of several.
bool is_single_representation(const SparseBinaryVector& location,
                              const ClassMemory& memory, std::size_t position);

enum class InferenceStatus { Correct, WrongClass, NoConvergence, Ambiguous };

std::string_view to_string(InferenceStatus status);

struct InferenceResult {
  InferenceStatus status = InferenceStatus::NoConvergence;
  std::optional<int> predicted_class;
  int sensations_used = 0;
};

/// What one sensation did to the network.
struct StepRecord {
  int position = 0;
  SparseBinaryVector predictive;      // sensory cells predicted before sensing
  SparseBinaryVector active_sensory;  // after the burst/inhibit rule
  Classification classification;
};

struct FeaturePrediction {
  int position = 0;
  SparseBinaryVector columns;  // 128-dim
  SparseBinaryVector cells;    // predictive sensory cells

  std::vector<Index> cells_in_column(Index column,
                                     const SensoryLayerShape& shape) const;
};

/// Mutable state of one recognition attempt against a read-only network.
class InferenceSession {
 public:
  explicit InferenceSession(const Network& network);

  /// Move (skipped on the first sensation), predict, sense, recall location,
  /// classify.
  StepRecord step(Movement movement, const SparseBinaryVector& feature,
                  int position);

  /// step() with the movement taken from the previous position.
  StepRecord sense(int position, const SparseBinaryVector& feature);

  /// Features the current location predicts at `target`. Leaves the session
  /// untouched.
  FeaturePrediction predict_feature_at(int target) const;

  const Network& network() const { return *network_; }
  const LocationRepresentation& location() const { return location_; }
  std::optional<int> position() const { return position_; }
  int sensations() const { return sensations_; }

 private:
  const Network* network_;
  LocationRepresentation location_;
  std::optional<int> position_;
  int sensations_ = 0;
};

FeaturePrediction predict_feature_at(const InferenceSession& session,
                                     int target_position);

using StepObserver =
    std::function<void(const InferenceSession&, const StepRecord&)>;

/// Senses `grid` along `order` until a class fires or the sequence (capped at
/// max_sensations) runs out.
InferenceResult run_inference(const Network& network, const FeatureGrid& grid,
                              std::span<const int> order,
                              int max_sensations = 25,
                              const StepObserver& observer = {});

}  // namespace gridloc
