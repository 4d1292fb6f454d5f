#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "gridloc/experiment.hpp"
#include "gridloc/learning.hpp"

using namespace gridloc;

namespace {

ExperimentConfig synthetic(std::size_t pool, std::size_t epc, double perturbation = 0.0) {
  ExperimentConfig c;
  c.data.synthetic = SyntheticSpec{10, pool, perturbation};
  c.data.synthetic_train_per_class = 5;
  c.data.synthetic_test_per_class = 3;
  c.examples_per_class = {epc};
  c.threads = 4;
  return c;
}

std::string accuracy_csv(const ExperimentConfig& c) {
  const auto rows = run_accuracy_experiment(c);
  std::ostringstream s;
  write_accuracy_csv(s, rows, summarize(rows));
  return s.str();
}

}  // namespace

TEST_CASE("config validation") {
  auto c = synthetic(250, 1);
  CHECK_NOTHROW(validate(c));
  c.examples_per_class = {0};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = synthetic(250, 1);
  c.seeds.clear();
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK(parse_classifier("knn") == ClassifierKind::Knn);
  CHECK(to_string(ClassifierKind::GridCellNet) == "gridcellnet");
  CHECK_THROWS_AS(parse_classifier("lstm"), std::invalid_argument);
  // one neighbour by default
  CHECK(ExperimentConfig{}.knn_k == std::vector<std::size_t>{1});
}

TEST_CASE("missing dataset fails before training") {
  ExperimentConfig c;
  c.data.train_path = "/nonexistent/train.fgrd";
  CHECK_THROWS_WITH(run_accuracy_experiment(c), doctest::Contains("dataset not found"));
  ExperimentConfig none;
  CHECK_THROWS_AS(run_accuracy_experiment(none), std::invalid_argument);
}

TEST_CASE("few-shot selection") {
  const auto data = load_dataset(synthetic(30, 1, 0.5).data);
  const auto a = select_few_shot(data.train_pool, 2, 9);
  CHECK(a == select_few_shot(data.train_pool, 2, 9));
  CHECK(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].label == static_cast<int>(i / 2));
  CHECK_THROWS_AS(select_few_shot(data.train_pool, 6, 9), std::invalid_argument);
}

TEST_CASE("test slice") {
  auto c = synthetic(250, 1);
  c.data.test_offset = 5;
  c.data.test_limit = 7;
  const auto d = load_dataset(c.data);
  CHECK(d.test.size() == 7);
  CHECK(d.test.front() == load_dataset(synthetic(250, 1).data).test[5]);
  c.data.test_offset = 1000;
  CHECK_THROWS_AS(load_dataset(c.data), std::out_of_range);
}

TEST_CASE("one example per class recalls every test item") {
  const auto c = synthetic(250, 1);
  const auto data = load_dataset(c.data);
  const auto setup = make_run_setup(c, data, 0, 1);
  for (const auto& t : data.test) {
    CHECK(std::find(setup.train.begin(), setup.train.end(), t) != setup.train.end());
  }
  const auto rows = run_accuracy_experiment(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].accuracy == 1.0);
  CHECK(rows[0].protocol == "fixed");
}

TEST_CASE("identical config gives an identical CSV") {
  auto c = synthetic(20, 2, 0.2);
  c.seeds = {1, 2, 3};
  const auto a = accuracy_csv(c);
  c.threads = 1;
  CHECK(accuracy_csv(c) == a);
  c.seeds = {1, 2, 4};
  CHECK(accuracy_csv(c) != a);
}

TEST_CASE("theta_loc sweep rows and summaries") {
  auto c = synthetic(20, 2, 0.2);
  c.theta_loc = {11, 13, 15};
  c.seeds = {0, 1, 2};
  const auto rows = run_accuracy_experiment(c);
  REQUIRE(rows.size() == 9);
  std::set<std::size_t> params;
  for (const auto& r : rows) {
    params.insert(r.param);
    CHECK(r.accuracy == accuracy_of(r.records));
    CHECK(r.records.size() == 30);
  }
  CHECK(params == std::set<std::size_t>{11, 13, 15});

  const auto summary = summarize(rows);
  REQUIRE(summary.size() == 3);
  for (const auto& s : summary) {
    CHECK(s.num_seeds == 3);
    double mean = 0;
    for (const auto& r : rows) {
      if (r.param == s.param) mean += r.accuracy / 3;
    }
    CHECK(s.mean_accuracy == doctest::Approx(mean));
    CHECK(s.ci95_half_width >= 0.0);
  }

  std::ostringstream csv;
  write_accuracy_csv(csv, rows, summary);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "seed,examples_per_class,protocol,classifier,accuracy,mean_sensations,param");
  std::size_t n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 9 + 2 * 3);
}

TEST_CASE("confidence interval uses Student's t") {
  AccuracyRow a;
  a.accuracy = 0.5;
  AccuracyRow b = a;
  b.accuracy = 0.7;
  AccuracyRow c = a;
  c.accuracy = 0.9;
  const std::vector<AccuracyRow> rows{a, b, c};
  const auto s = summarize(rows);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean_accuracy == doctest::Approx(0.7));
  // t(0.975, 2) = 4.302653, sd = 0.2
  CHECK(s[0].ci95_half_width == doctest::Approx(4.302653 * 0.2 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("raw records back the reported accuracy") {
  auto c = synthetic(10, 2, 0.3);
  const auto rows = run_accuracy_experiment(c);
  std::ostringstream s;
  write_records_csv(s, rows);
  std::istringstream in(s.str());
  std::string line;
  std::getline(in, line);
  std::size_t total = 0;
  std::size_t correct = 0;
  while (std::getline(in, line)) {
    ++total;
    correct += line.find(",correct,") != std::string::npos;
  }
  CHECK(total == rows[0].records.size());
  CHECK(static_cast<double>(correct) / static_cast<double>(total) == rows[0].accuracy);
}

TEST_CASE("sensation curves") {
  auto c = synthetic(10, 2);
  c.protocol = parse_protocol("arbitrary");
  const auto curve = run_sensations_curve(c);
  REQUIRE(curve.size() == 25);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].n_sensations == i + 1);
    if (i > 0) CHECK(curve[i].cumulative_accuracy >= curve[i - 1].cumulative_accuracy);
  }
  // distinguishable objects: the maximum is reached before n = 25
  const double top = curve.back().cumulative_accuracy;
  CHECK(top == run_accuracy_experiment(c)[0].accuracy);
  CHECK(curve[23].cumulative_accuracy == top);

  c.classifier = ClassifierKind::Knn;
  c.data.synthetic->perturbation = 0.3;
  const auto knn_curve = run_sensations_curve(c);
  REQUIRE(knn_curve.size() == 25);
  CHECK(knn_curve.back().cumulative_accuracy == run_accuracy_experiment(c)[0].accuracy);

  c.protocol = parse_protocol("partial:6");
  CHECK(run_sensations_curve(c).size() == 6);
  std::ostringstream s;
  write_curve_csv(s, knn_curve);
  CHECK(s.str().rfind("seed,examples_per_class,protocol,classifier,param,n_sensations,"
                      "cumulative_accuracy\n",
                      0) == 0);
}

TEST_CASE("partial sequences cap the sensations") {
  auto c = synthetic(10, 2, 0.3);
  c.protocol = parse_protocol("partial:3");
  for (const auto& r : run_accuracy_experiment(c)[0].records) {
    CHECK(r.result.sensations_used <= 3);
  }
}

TEST_CASE("prediction traces") {
  auto c = synthetic(250, 1);
  c.protocol = parse_protocol("arbitrary");
  const auto data = load_dataset(c.data);
  const auto setup = make_run_setup(c, data, 0, 1);
  const auto net = train_network(c, setup);
  std::vector<std::size_t> ids{0, 4, 29};
  const auto traces = build_prediction_traces(net, data.test, setup.test_orders, ids);
  REQUIRE(traces.size() == 3);
  for (const auto& t : traces) {
    CHECK(t.converged);
    CHECK_FALSE(t.union_at_inference);
    CHECK(t.decodable);
    REQUIRE_FALSE(t.frames.empty());
    // nothing is predicted from before the first sensation
    CHECK(t.frames.front().step >= 1);
    CHECK(t.frames.back().kind == TraceFrame::Kind::Final);
    const auto& grid = t.frames.back().grid;
    const bool stored = std::any_of(setup.train.begin(), setup.train.end(),
                                    [&](const FeatureGrid& g) { return g.features == grid; });
    CHECK(stored);
  }
  CHECK_THROWS_AS(build_prediction_traces(net, data.test, setup.test_orders,
                                          std::vector<std::size_t>{30}),
                  std::out_of_range);
}

TEST_CASE("traces over several sensations") {
  auto c = synthetic(10, 1);
  c.protocol = parse_protocol("arbitrary");
  const auto data = load_dataset(c.data);
  const auto setup = make_run_setup(c, data, 0, 1);
  const auto net = train_network(c, setup);
  std::vector<std::size_t> ids(data.test.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  const auto traces = build_prediction_traces(net, data.test, setup.test_orders, ids);
  bool saw_multi = false;
  for (const auto& t : traces) {
    const auto& order = setup.test_orders[t.example];
    for (const auto& f : t.frames) {
      if (f.kind != TraceFrame::Kind::Next) continue;
      saw_multi = true;
      CHECK(f.step >= 1);
      CHECK(f.sensed_positions.size() == static_cast<std::size_t>(f.step));
      CHECK(f.predicted_position == order[static_cast<std::size_t>(f.step)]);
      CHECK(f.grid[static_cast<std::size_t>(*f.predicted_position)] == f.predicted_columns);
    }
    const auto json = trace_to_jsonl(t);
    CHECK(static_cast<std::size_t>(std::count(json.begin(), json.end(), '\n')) == t.frames.size());
  }
  CHECK(saw_multi);
}

TEST_CASE("a union at inference is not decodable") {
  // two class-0 examples share every feature except position 24, so the
  // first sensation recalls both and still names class 0
  Rng rng(1);
  FeatureGrid a;
  for (auto& f : a.features) f = random_sdr(128, 19, rng);
  FeatureGrid b = a;
  b.features[24] = random_sdr(128, 19, rng);
  FeatureGrid other;
  other.label = 1;
  for (auto& f : other.features) f = random_sdr(128, 19, rng);

  Network net(NetworkParams{}, 2);
  Rng learn(3);
  for (const auto* g : {&a, &b, &other}) train_example(*g, raster_order(), learn, net);

  const std::vector<FeatureGrid> test{a};
  const std::vector<Order> orders{raster_order()};
  const auto traces = build_prediction_traces(net, test, orders, std::vector<std::size_t>{0});
  REQUIRE(traces.size() == 1);
  CHECK(traces[0].converged);
  CHECK(traces[0].result.status == InferenceStatus::Correct);
  CHECK(traces[0].union_at_inference);
  CHECK_FALSE(traces[0].decodable);
  CHECK(trace_to_jsonl(traces[0]).find("\"union\":true") != std::string::npos);
}

TEST_CASE("trace export writes JSON-lines and decodable grids") {
  auto c = synthetic(250, 1);
  const auto prefix = std::filesystem::temp_directory_path() / "gridloc_test_traces";
  const std::vector<std::size_t> ids{1, 2};
  const auto traces = export_prediction_traces(c, ids, prefix);
  const auto grids = load_feature_grids(prefix.string() + ".fgrd");
  CHECK(grids.size() == 2);
  CHECK(std::filesystem::file_size(prefix.string() + ".jsonl") > 0);
  CHECK_THROWS_AS(export_prediction_traces(c, std::vector<std::size_t>{999}, prefix),
                  std::out_of_range);
  std::filesystem::remove(prefix.string() + ".fgrd");
  std::filesystem::remove(prefix.string() + ".jsonl");
}
