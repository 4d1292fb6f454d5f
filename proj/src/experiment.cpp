#include "gridloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "gridloc/knn.hpp"
#include "gridloc/learning.hpp"

namespace gridloc {

namespace {

enum Stream : std::uint64_t {
  kSyntheticData = 1,
  kSelection = 2,
  kOrders = 3,
  kModules = 4,
  kLearning = 5,
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, work));
}

template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  const std::size_t n = resolve_threads(threads, count);
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<FeatureGrid> load_required(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("dataset not found: " + path.string());
  }
  return load_feature_grids(path);
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  return kind == ClassifierKind::Knn ? "knn" : "gridcellnet";
}

ClassifierKind parse_classifier(std::string_view text) {
  if (text == "gridcellnet") return ClassifierKind::GridCellNet;
  if (text == "knn") return ClassifierKind::Knn;
  throw std::invalid_argument("unknown classifier '" + std::string(text) +
                              "' (expected gridcellnet or knn)");
}

Dataset load_dataset(const DatasetSource& source) {
  Dataset out;
  if (source.synthetic) {
    Rng rng(derive_seed(source.data_seed, kSyntheticData));
    const SyntheticObjects objects(*source.synthetic, rng);
    out.train_pool = objects.generate(source.synthetic_train_per_class, rng);
    out.test = objects.generate(source.synthetic_test_per_class, rng);
  } else {
    if (!source.train_path) {
      throw std::invalid_argument("no dataset: give a data file or a synthetic spec");
    }
    out.train_pool = load_required(*source.train_path);
    out.test = load_required(source.test_path.value_or(*source.train_path));
  }
  if (source.test_offset > out.test.size()) {
    throw std::out_of_range("test offset " + std::to_string(source.test_offset) +
                            " beyond " + std::to_string(out.test.size()) +
                            " test examples");
  }
  const auto first = out.test.begin() + static_cast<long>(source.test_offset);
  const auto available = out.test.size() - source.test_offset;
  const auto last = first + static_cast<long>(std::min(available, source.test_limit));
  out.test = std::vector<FeatureGrid>(first, last);
  if (out.test.empty()) throw std::invalid_argument("empty test set");
  return out;
}

void validate(const ExperimentConfig& config) {
  if (config.examples_per_class.empty()) {
    throw std::invalid_argument("no examples_per_class given");
  }
  for (auto e : config.examples_per_class) {
    if (e < 1) throw std::invalid_argument("examples_per_class must be >= 1");
  }
  if (config.seeds.empty()) throw std::invalid_argument("at least one seed required");
  if (config.classifier == ClassifierKind::GridCellNet && config.theta_loc.empty()) {
    throw std::invalid_argument("no theta_loc given");
  }
  if (config.classifier == ClassifierKind::Knn && config.knn_k.empty()) {
    throw std::invalid_argument("no k given");
  }
  for (auto k : config.knn_k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
  }
  if (config.protocol.length < 1 || config.protocol.length > kNumPositions) {
    throw std::invalid_argument("sequence length must be in 1..25");
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<FeatureGrid> select_few_shot(std::span<const FeatureGrid> pool,
                                         std::size_t per_class,
                                         std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < pool.size(); ++i) by_class[pool[i].label].push_back(i);
  if (by_class.empty()) throw std::invalid_argument("empty training pool");

  Rng rng(seed);
  std::vector<FeatureGrid> out;
  out.reserve(by_class.size() * per_class);
  for (auto& [label, idx] : by_class) {
    if (idx.size() < per_class) {
      throw std::invalid_argument("class " + std::to_string(label) + " has " +
                                  std::to_string(idx.size()) +
                                  " examples, need " + std::to_string(per_class));
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < per_class; ++i) out.push_back(pool[idx[i]]);
  }
  return out;
}

RunSetup make_run_setup(const ExperimentConfig& config, const Dataset& data,
                        std::uint64_t seed, std::size_t examples_per_class) {
  RunSetup s;
  s.seed = seed;
  s.examples_per_class = examples_per_class;
  s.train = select_few_shot(data.train_pool, examples_per_class,
                            derive_seed(seed, kSelection));
  OrderSource orders(config.protocol, derive_seed(seed, kOrders));
  for (std::size_t i = 0; i < s.train.size(); ++i) {
    s.train_orders.push_back(orders.training_order());
  }
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    s.test_orders.push_back(orders.test_order());
  }
  return s;
}

Network train_network(const ExperimentConfig& config, const RunSetup& setup) {
  NetworkParams params = config.network;
  params.theta_in = config.theta_in;
  if (!config.theta_loc.empty()) params.theta_loc = config.theta_loc.front();
  Network network(params, derive_seed(setup.seed, kModules));
  Rng rng(derive_seed(setup.seed, kLearning));
  for (std::size_t i = 0; i < setup.train.size(); ++i) {
    train_example(setup.train[i], setup.train_orders[i], rng, network);
  }
  return network;
}

std::vector<EvaluationRecord> evaluate_network(const Network& network,
                                               std::span<const FeatureGrid> test,
                                               std::span<const Order> orders,
                                               std::size_t threads) {
  if (test.size() != orders.size()) {
    throw std::invalid_argument("one order per test example required");
  }
  std::vector<EvaluationRecord> out(test.size());
  parallel_for(test.size(), threads, [&](std::size_t i) {
    out[i].example = i;
    out[i].label = test[i].label;
    out[i].result = run_inference(network, test[i], orders[i],
                                  static_cast<int>(orders[i].size()));
  });
  return out;
}

std::vector<EvaluationRecord> evaluate_knn(std::span<const FeatureGrid> train,
                                           std::span<const Order> train_orders,
                                           std::span<const FeatureGrid> test,
                                           std::span<const Order> test_orders,
                                           std::size_t k, std::size_t prefix_len) {
  if (test.size() != test_orders.size()) {
    throw std::invalid_argument("one order per test example required");
  }
  KnnClassifier knn(k, prefix_len);
  knn.fit(train, train_orders);
  std::vector<EvaluationRecord> out(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int predicted = knn.predict(test[i], test_orders[i]);
    out[i].example = i;
    out[i].label = test[i].label;
    out[i].result.predicted_class = predicted;
    out[i].result.status = predicted == test[i].label ? InferenceStatus::Correct
                                                      : InferenceStatus::WrongClass;
    out[i].result.sensations_used = static_cast<int>(prefix_len);
  }
  return out;
}

double accuracy_of(std::span<const EvaluationRecord> records) {
  if (records.empty()) return 0.0;
  const auto correct = std::count_if(records.begin(), records.end(), [](const auto& r) {
    return r.result.status == InferenceStatus::Correct;
  });
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double mean_sensations_of(std::span<const EvaluationRecord> records) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.result.sensations_used;
  return sum / static_cast<double>(records.size());
}

std::vector<AccuracyRow> run_accuracy_experiment(const ExperimentConfig& config) {
  validate(config);
  const Dataset data = load_dataset(config.data);
  const std::string protocol = config.protocol.to_string();

  std::vector<AccuracyRow> rows;
  for (auto seed : config.seeds) {
    for (auto epc : config.examples_per_class) {
      const RunSetup setup = make_run_setup(config, data, seed, epc);
      auto emit = [&](std::size_t param, std::vector<EvaluationRecord> records) {
        AccuracyRow row;
        row.seed = seed;
        row.examples_per_class = epc;
        row.protocol = protocol;
        row.classifier = config.classifier;
        row.param = param;
        row.accuracy = accuracy_of(records);
        row.mean_sensations = mean_sensations_of(records);
        row.records = std::move(records);
        rows.push_back(std::move(row));
      };
      if (config.classifier == ClassifierKind::GridCellNet) {
        Network network = train_network(config, setup);
        for (auto theta : config.theta_loc) {
          network.set_theta_loc(theta);
          emit(theta, evaluate_network(network, data.test, setup.test_orders,
                                       config.threads));
        }
      } else {
        for (auto k : config.knn_k) {
          emit(k, evaluate_knn(setup.train, setup.train_orders, data.test,
                               setup.test_orders, k, config.protocol.length));
        }
      }
    }
  }
  return rows;
}

std::vector<AccuracyRow> evaluate_saved_model(const ExperimentConfig& config,
                                              Network network) {
  validate(config);
  const Dataset data = load_dataset(config.data);
  const auto& memory = network.memory();
  const std::size_t classes = std::max<std::size_t>(1, memory.labels().size());
  std::vector<AccuracyRow> rows;
  for (auto seed : config.seeds) {
    OrderSource source(config.protocol, derive_seed(seed, kOrders));
    std::vector<Order> orders;
    for (std::size_t i = 0; i < data.test.size(); ++i) {
      orders.push_back(source.test_order());
    }
    for (auto theta : config.theta_loc) {
      network.set_theta_loc(theta);
      AccuracyRow row;
      row.seed = seed;
      row.examples_per_class = memory.total_examples() / classes;
      row.protocol = config.protocol.to_string();
      row.param = theta;
      row.records = evaluate_network(network, data.test, orders, config.threads);
      row.accuracy = accuracy_of(row.records);
      row.mean_sensations = mean_sensations_of(row.records);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SummaryRow> summarize(std::span<const AccuracyRow> rows) {
  using Key = std::tuple<std::size_t, std::string, ClassifierKind, std::size_t>;
  std::vector<Key> keys;
  std::map<Key, std::vector<const AccuracyRow*>> groups;
  for (const auto& r : rows) {
    Key key{r.examples_per_class, r.protocol, r.classifier, r.param};
    auto& g = groups[key];
    if (g.empty()) keys.push_back(key);
    g.push_back(&r);
  }

  std::vector<SummaryRow> out;
  for (const auto& key : keys) {
    const auto& g = groups[key];
    SummaryRow s;
    std::tie(s.examples_per_class, s.protocol, s.classifier, s.param) = key;
    s.num_seeds = g.size();
    const double n = static_cast<double>(g.size());
    for (const auto* r : g) {
      s.mean_accuracy += r->accuracy;
      s.mean_sensations += r->mean_sensations;
    }
    s.mean_accuracy /= n;
    s.mean_sensations /= n;
    if (g.size() > 1) {
      double ss = 0.0;
      for (const auto* r : g) ss += (r->accuracy - s.mean_accuracy) * (r->accuracy - s.mean_accuracy);
      const double sd = std::sqrt(ss / (n - 1.0));
      const boost::math::students_t dist(n - 1.0);
      s.ci95_half_width = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_accuracy_csv(std::ostream& out, std::span<const AccuracyRow> rows,
                        std::span<const SummaryRow> summary) {
  out << "seed,examples_per_class,protocol,classifier,accuracy,mean_sensations,param\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.examples_per_class << ',' << r.protocol << ','
        << to_string(r.classifier) << ',' << fmt(r.accuracy) << ','
        << fmt(r.mean_sensations) << ',' << r.param << '\n';
  }
  for (const auto& s : summary) {
    out << "mean," << s.examples_per_class << ',' << s.protocol << ','
        << to_string(s.classifier) << ',' << fmt(s.mean_accuracy) << ','
        << fmt(s.mean_sensations) << ',' << s.param << '\n';
    out << "ci95," << s.examples_per_class << ',' << s.protocol << ','
        << to_string(s.classifier) << ',' << fmt(s.ci95_half_width) << ','
        << fmt(0.0) << ',' << s.param << '\n';
  }
}

void write_records_csv(std::ostream& out, std::span<const AccuracyRow> rows) {
  out << "seed,examples_per_class,classifier,param,example,label,status,"
         "predicted,sensations\n";
  for (const auto& r : rows) {
    for (const auto& e : r.records) {
      out << r.seed << ',' << r.examples_per_class << ','
          << to_string(r.classifier) << ',' << r.param << ',' << e.example << ','
          << e.label << ',' << to_string(e.result.status) << ',';
      if (e.result.predicted_class) out << *e.result.predicted_class;
      out << ',' << e.result.sensations_used << '\n';
    }
  }
}

std::vector<CurveRow> run_sensations_curve(const ExperimentConfig& config) {
  validate(config);
  const Dataset data = load_dataset(config.data);
  const std::string protocol = config.protocol.to_string();
  const std::size_t length = config.protocol.length;

  std::vector<CurveRow> rows;
  for (auto seed : config.seeds) {
    for (auto epc : config.examples_per_class) {
      const RunSetup setup = make_run_setup(config, data, seed, epc);
      auto row = [&](std::size_t param, std::size_t n, double acc) {
        rows.push_back(
            {seed, epc, protocol, config.classifier, param, n, acc});
      };
      if (config.classifier == ClassifierKind::GridCellNet) {
        Network network = train_network(config, setup);
        for (auto theta : config.theta_loc) {
          network.set_theta_loc(theta);
          const auto records = evaluate_network(network, data.test,
                                                setup.test_orders, config.threads);
          for (std::size_t n = 1; n <= length; ++n) {
            const auto hits = std::count_if(
                records.begin(), records.end(), [n](const EvaluationRecord& r) {
                  return r.result.status == InferenceStatus::Correct &&
                         static_cast<std::size_t>(r.result.sensations_used) <= n;
                });
            row(theta, n,
                static_cast<double>(hits) / static_cast<double>(records.size()));
          }
        }
      } else {
        for (auto k : config.knn_k) {
          for (std::size_t n = 1; n <= length; ++n) {
            row(k, n,
                accuracy_of(evaluate_knn(setup.train, setup.train_orders,
                                         data.test, setup.test_orders, k, n)));
          }
        }
      }
    }
  }
  return rows;
}

void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows) {
  out << "seed,examples_per_class,protocol,classifier,param,n_sensations,"
         "cumulative_accuracy\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.examples_per_class << ',' << r.protocol << ','
        << to_string(r.classifier) << ',' << r.param << ',' << r.n_sensations
        << ',' << fmt(r.cumulative_accuracy) << '\n';
  }
}

std::vector<ExampleTrace> build_prediction_traces(
    const Network& network, std::span<const FeatureGrid> test,
    std::span<const Order> orders, std::span<const std::size_t> example_ids) {
  if (test.size() != orders.size()) {
    throw std::invalid_argument("one order per test example required");
  }
  const auto& shape = network.params().sensory;
  std::vector<ExampleTrace> out;
  for (auto id : example_ids) {
    if (id >= test.size()) {
      throw std::out_of_range("example id " + std::to_string(id) +
                              " out of range (" + std::to_string(test.size()) +
                              " test examples)");
    }
    const FeatureGrid& grid = test[id];
    const Order& order = orders[id];
    ExampleTrace trace;
    trace.example = id;
    trace.label = grid.label;

    InferenceSession session(network);
    std::array<SparseBinaryVector, kNumPositions> known;
    known.fill(SparseBinaryVector(shape.num_columns));
    std::vector<int> sensed;

    auto predict = [&](int target) {
      if (session.location().empty()) return SparseBinaryVector(shape.num_columns);
      return session.predict_feature_at(target).columns;
    };

    for (std::size_t t = 0; t < order.size(); ++t) {
      const int pos = order[t];
      if (t > 0) {
        TraceFrame frame;
        frame.step = static_cast<int>(t);
        frame.sensed_positions = sensed;
        frame.predicted_position = pos;
        frame.predicted_columns = predict(pos);
        frame.grid = known;
        frame.grid[static_cast<std::size_t>(pos)] = frame.predicted_columns;
        trace.frames.push_back(std::move(frame));
      }
      const auto record = session.sense(pos, grid.at(static_cast<std::size_t>(pos)));
      known[static_cast<std::size_t>(pos)] = grid.at(static_cast<std::size_t>(pos));
      sensed.push_back(pos);
      trace.result.sensations_used = static_cast<int>(t + 1);

      const auto& c = record.classification;
      if (c.status == ClassifyStatus::Ambiguous) {
        trace.result.status = InferenceStatus::Ambiguous;
        break;
      }
      if (c.status != ClassifyStatus::Classified) continue;

      trace.converged = true;
      trace.result.predicted_class = c.label;
      trace.result.status = *c.label == grid.label ? InferenceStatus::Correct
                                                   : InferenceStatus::WrongClass;
      trace.union_at_inference = !is_single_representation(
          session.location().flatten(), network.memory(),
          static_cast<std::size_t>(pos));

      TraceFrame final_frame;
      final_frame.kind = TraceFrame::Kind::Final;
      final_frame.step = static_cast<int>(t + 1);
      final_frame.sensed_positions = sensed;
      final_frame.grid = known;
      bool complete = true;
      for (std::size_t p = 0; p < kNumPositions; ++p) {
        if (std::find(sensed.begin(), sensed.end(), static_cast<int>(p)) != sensed.end()) {
          continue;
        }
        final_frame.grid[p] = predict(static_cast<int>(p));
        if (final_frame.grid[p].cardinality() != kFeatureActive) complete = false;
      }
      trace.decodable = !trace.union_at_inference && complete;
      trace.frames.push_back(std::move(final_frame));
      break;
    }
    out.push_back(std::move(trace));
  }
  return out;
}

std::string trace_to_jsonl(const ExampleTrace& trace) {
  using nlohmann::json;
  auto indices = [](const SparseBinaryVector& v) {
    return json(std::vector<Index>(v.begin(), v.end()));
  };
  std::string out;
  for (const auto& f : trace.frames) {
    json j;
    j["example"] = trace.example;
    j["label"] = trace.label;
    j["status"] = std::string(to_string(trace.result.status));
    j["predicted_class"] = trace.result.predicted_class
                               ? json(*trace.result.predicted_class)
                               : json(nullptr);
    j["converged"] = trace.converged;
    j["union"] = trace.union_at_inference;
    j["decodable"] = trace.decodable;
    j["frame"] = f.kind == TraceFrame::Kind::Final ? "final" : "next";
    j["step"] = f.step;
    j["sensed"] = f.sensed_positions;
    j["predicted_position"] =
        f.predicted_position ? json(*f.predicted_position) : json(nullptr);
    j["predicted_columns"] = indices(f.predicted_columns);
    json grid = json::array();
    for (const auto& cell : f.grid) grid.push_back(indices(cell));
    j["grid"] = std::move(grid);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ExampleTrace> export_prediction_traces(
    const ExperimentConfig& config, std::span<const std::size_t> example_ids,
    const std::filesystem::path& prefix) {
  validate(config);
  const Dataset data = load_dataset(config.data);
  for (auto id : example_ids) {
    if (id >= data.test.size()) {
      throw std::out_of_range("example id " + std::to_string(id) +
                              " out of range (" + std::to_string(data.test.size()) +
                              " test examples)");
    }
  }
  const RunSetup setup = make_run_setup(config, data, config.seeds.front(),
                                        config.examples_per_class.front());
  const Network network = train_network(config, setup);
  auto traces =
      build_prediction_traces(network, data.test, setup.test_orders, example_ids);

  std::ofstream jsonl(prefix.string() + ".jsonl");
  if (!jsonl) throw std::runtime_error("cannot write " + prefix.string() + ".jsonl");
  std::vector<FeatureGrid> decodable;
  for (const auto& t : traces) {
    jsonl << trace_to_jsonl(t);
    if (!t.decodable) continue;
    FeatureGrid g;
    g.features = t.frames.back().grid;
    g.label = *t.result.predicted_class;
    decodable.push_back(std::move(g));
  }
  save_fgrd(prefix.string() + ".fgrd", decodable);
  return traces;
}

}  // namespace gridloc
