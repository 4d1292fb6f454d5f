#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridloc/dataset.hpp"
#include "gridloc/inference.hpp"
#include "gridloc/network.hpp"

namespace gridloc {

enum class ClassifierKind { GridCellNet, Knn };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view text);

/// Where examples come from: a training pool and a test file, or a
/// synthetic generator producing both from `data_seed`.
struct DatasetSource {
  std::optional<std::filesystem::path> train_path;
  std::optional<std::filesystem::path> test_path;
  std::optional<SyntheticSpec> synthetic;
  std::size_t synthetic_train_per_class = 20;
  std::size_t synthetic_test_per_class = 10;
  std::uint64_t data_seed = 0;
  std::size_t test_offset = 0;
  std::size_t test_limit = 1000;
};

struct Dataset {
  std::vector<FeatureGrid> train_pool;
  std::vector<FeatureGrid> test;
};

/// Fails before any training if a file is missing or malformed.
Dataset load_dataset(const DatasetSource& source);

struct ExperimentConfig {
  DatasetSource data;
  std::vector<std::size_t> examples_per_class{5};
  SequenceProtocol protocol{};
  std::vector<std::size_t> theta_loc{13};
  std::size_t theta_in = 20;
  std::vector<std::uint64_t> seeds{0};
  ClassifierKind classifier = ClassifierKind::GridCellNet;
  std::vector<std::size_t> knn_k{1};
  NetworkParams network{};
  std::size_t threads = 0;  // 0: hardware concurrency
};

void validate(const ExperimentConfig& config);

/// Independent stream for one purpose of one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// The first `per_class` examples of each class after a seeded shuffle of
/// the pool. Throws if a class has too few.
std::vector<FeatureGrid> select_few_shot(std::span<const FeatureGrid> pool,
                                         std::size_t per_class,
                                         std::uint64_t seed);

/// One (seed, examples_per_class) setup: chosen training examples, their
/// training orders and the test orders, all drawn from the seed.
struct RunSetup {
  std::uint64_t seed = 0;
  std::size_t examples_per_class = 0;
  std::vector<FeatureGrid> train;
  std::vector<Order> train_orders;
  std::vector<Order> test_orders;
};

RunSetup make_run_setup(const ExperimentConfig& config, const Dataset& data,
                        std::uint64_t seed, std::size_t examples_per_class);

Network train_network(const ExperimentConfig& config, const RunSetup& setup);

struct EvaluationRecord {
  std::size_t example = 0;
  int label = 0;
  InferenceResult result;
};

/// Runs every test example against the read-only network, in parallel,
/// merged by example index.
std::vector<EvaluationRecord> evaluate_network(
    const Network& network, std::span<const FeatureGrid> test,
    std::span<const Order> orders, std::size_t threads);

std::vector<EvaluationRecord> evaluate_knn(std::span<const FeatureGrid> train,
                                           std::span<const Order> train_orders,
                                           std::span<const FeatureGrid> test,
                                           std::span<const Order> test_orders,
                                           std::size_t k, std::size_t prefix_len);

/// Fraction of records with status Correct.
double accuracy_of(std::span<const EvaluationRecord> records);
double mean_sensations_of(std::span<const EvaluationRecord> records);

struct AccuracyRow {
  std::uint64_t seed = 0;
  std::size_t examples_per_class = 0;
  std::string protocol;
  ClassifierKind classifier = ClassifierKind::GridCellNet;
  std::size_t param = 0;  // theta_loc for gridcellnet, k for knn
  double accuracy = 0.0;
  double mean_sensations = 0.0;
  std::vector<EvaluationRecord> records;
};

struct SummaryRow {
  std::size_t examples_per_class = 0;
  std::string protocol;
  ClassifierKind classifier = ClassifierKind::GridCellNet;
  std::size_t param = 0;
  std::size_t num_seeds = 0;
  double mean_accuracy = 0.0;
  double ci95_half_width = 0.0;  // Student-t over seeds, 0 for one seed
  double mean_sensations = 0.0;
};

std::vector<AccuracyRow> run_accuracy_experiment(const ExperimentConfig& config);
std::vector<SummaryRow> summarize(std::span<const AccuracyRow> rows);

/// Evaluates an already trained network on the config's test set, one row
/// per (seed, theta_loc). Test orders are drawn from each seed.
std::vector<AccuracyRow> evaluate_saved_model(const ExperimentConfig& config,
                                              Network network);

/// Header: seed,examples_per_class,protocol,classifier,accuracy,
/// mean_sensations,param. Summary rows follow with seed "mean" and "ci95".
void write_accuracy_csv(std::ostream& out, std::span<const AccuracyRow> rows,
                        std::span<const SummaryRow> summary);

/// Per-example raw results: seed,examples_per_class,classifier,param,
/// example,label,status,predicted,sensations.
void write_records_csv(std::ostream& out, std::span<const AccuracyRow> rows);

struct CurveRow {
  std::uint64_t seed = 0;
  std::size_t examples_per_class = 0;
  std::string protocol;
  ClassifierKind classifier = ClassifierKind::GridCellNet;
  std::size_t param = 0;
  std::size_t n_sensations = 0;
  double cumulative_accuracy = 0.0;
};

/// gridcellnet: fraction Correct within n sensations. knn: accuracy of a
/// classifier refit on the first n features.
std::vector<CurveRow> run_sensations_curve(const ExperimentConfig& config);

void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows);

/// One decoder input: the representation accumulated after some sensations.
struct TraceFrame {
  enum class Kind { Next, Final };
  Kind kind = Kind::Next;
  int step = 0;  // sensations completed before the frame's prediction
  std::vector<int> sensed_positions;
  std::optional<int> predicted_position;  // Next frames only
  SparseBinaryVector predicted_columns;   // Next frames only
  // Sensed features where sensed, predicted columns elsewhere, empty where
  // nothing is known.
  std::array<SparseBinaryVector, kNumPositions> grid;
};

struct ExampleTrace {
  std::size_t example = 0;
  int label = 0;
  InferenceResult result;
  bool converged = false;  // a single class fired
  bool union_at_inference = false;
  bool decodable = false;  // single representation, every position predicted
  std::vector<TraceFrame> frames;
};

/// Replays each listed test example, recording the next-step prediction
/// after every sensation from the second on, and, once a class fires, a
/// final frame predicting every unsensed position.
std::vector<ExampleTrace> build_prediction_traces(
    const Network& network, std::span<const FeatureGrid> test,
    std::span<const Order> orders, std::span<const std::size_t> example_ids);

/// Writes `<prefix>.jsonl` with every frame and `<prefix>.fgrd` with the
/// final grids of decodable traces. Uses the first seed, examples_per_class
/// and theta_loc of the config.
std::vector<ExampleTrace> export_prediction_traces(
    const ExperimentConfig& config, std::span<const std::size_t> example_ids,
    const std::filesystem::path& prefix);

std::string trace_to_jsonl(const ExampleTrace& trace);

}  // namespace gridloc
