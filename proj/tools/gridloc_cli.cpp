// gridloc: train, evaluate and inspect the grid-cell location classifier.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridloc/dataset.hpp"
#include "gridloc/experiment.hpp"
#include "gridloc/learning.hpp"
#include "gridloc/model_io.hpp"

namespace {

using namespace gridloc;

struct Options {
  std::string data;
  std::string test;
  bool synthetic = false;
  std::size_t classes = 10;
  std::size_t pool = 250;
  double perturbation = 0.0;
  std::size_t synth_train = 20;
  std::size_t synth_test = 10;
  std::uint64_t data_seed = 0;
  std::vector<std::size_t> examples_per_class{5};
  std::string protocol = "fixed";
  std::vector<std::size_t> theta_loc{13};
  std::size_t theta_in = 20;
  std::vector<std::uint64_t> seeds{0};
  std::string classifier = "gridcellnet";
  std::vector<std::size_t> k{1};
  std::size_t test_offset = 0;
  std::size_t test_limit = 1000;
  std::size_t threads = 0;
  std::string out;
  std::string model;
  std::string records;
  std::vector<std::size_t> examples{0};
};

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig c;
  if (o.synthetic) {
    c.data.synthetic = SyntheticSpec{o.classes, o.pool, o.perturbation};
    c.data.synthetic_train_per_class = o.synth_train;
    c.data.synthetic_test_per_class = o.synth_test;
    c.data.data_seed = o.data_seed;
  } else if (!o.data.empty()) {
    c.data.train_path = o.data;
    if (!o.test.empty()) c.data.test_path = o.test;
  }
  c.data.test_offset = o.test_offset;
  c.data.test_limit = o.test_limit;
  c.examples_per_class = o.examples_per_class;
  c.protocol = parse_protocol(o.protocol);
  c.theta_loc = o.theta_loc;
  c.theta_in = o.theta_in;
  c.seeds = o.seeds;
  c.classifier = parse_classifier(o.classifier);
  c.knn_k = o.k;
  c.threads = o.threads;
  return c;
}

// Writes to --out, or stdout when it is empty.
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

std::string quoted(std::string s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void cmd_synth(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("synth needs --out");
  Rng rng(derive_seed(o.data_seed, 1));
  const SyntheticObjects objects({o.classes, o.pool, o.perturbation}, rng);
  const auto grids = objects.generate(o.synth_train, rng);
  if (o.out.ends_with(".jsonl")) {
    save_jsonl(o.out, grids);
  } else {
    save_fgrd(o.out, grids);
  }
}

void cmd_train(const Options& o) {
  const std::string path = o.model.empty() ? o.out : o.model;
  if (path.empty()) throw std::invalid_argument("train needs --model or --out");
  const auto config = make_config(o);
  validate(config);
  const auto data = load_dataset(config.data);
  const auto setup = make_run_setup(config, data, config.seeds.front(),
                                    config.examples_per_class.front());
  save_model(path, train_network(config, setup));
}

void cmd_eval(const Options& o) {
  const auto config = make_config(o);
  std::vector<AccuracyRow> rows;
  if (!o.model.empty()) {
    if (config.classifier != ClassifierKind::GridCellNet) {
      throw std::invalid_argument("--model applies to gridcellnet only");
    }
    validate(config);
    load_dataset(config.data);
    rows = evaluate_saved_model(config, load_model(o.model));
  } else {
    rows = run_accuracy_experiment(config);
  }
  const auto summary = summarize(rows);
  with_output(o.out, [&](std::ostream& s) { write_accuracy_csv(s, rows, summary); });
  if (!o.records.empty()) {
    with_output(o.records, [&](std::ostream& s) { write_records_csv(s, rows); });
  }
}

void cmd_curve(const Options& o) {
  const auto rows = run_sensations_curve(make_config(o));
  with_output(o.out, [&](std::ostream& s) { write_curve_csv(s, rows); });
}

void cmd_traces(const Options& o) {
  if (o.out.empty()) throw std::invalid_argument("traces needs --out prefix");
  const auto traces = export_prediction_traces(make_config(o), o.examples, o.out);
  for (const auto& t : traces) {
    std::cerr << "example " << t.example << ": " << to_string(t.result.status)
              << " after " << t.result.sensations_used << " sensations"
              << (t.union_at_inference ? ", union (not decodable)" : "")
              << (t.decodable ? ", decodable" : "") << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-cell location classifier over 5x5 feature grids"};
  app.set_config("--config", "", "key=value file mirroring the flags");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--data", o.data, "Training pool (FGRD or JSON-lines)");
  app.add_option("--test", o.test, "Test set; defaults to --data");
  app.add_flag("--synthetic", o.synthetic, "Generate synthetic objects instead of reading files");
  app.add_option("--classes", o.classes, "Synthetic classes")->capture_default_str();
  app.add_option("--pool-size", o.pool, "Synthetic feature pool size")->capture_default_str();
  app.add_option("--perturbation", o.perturbation, "Synthetic per-position replacement probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--synthetic-train", o.synth_train, "Synthetic training pool per class")
      ->capture_default_str();
  app.add_option("--synthetic-test", o.synth_test, "Synthetic test examples per class")
      ->capture_default_str();
  app.add_option("--data-seed", o.data_seed, "Seed for synthetic data")->capture_default_str();
  app.add_option("--examples-per-class", o.examples_per_class, "Training examples per class")
      ->capture_default_str();
  app.add_option("--protocol", o.protocol, "fixed, arbitrary or partial:N")->capture_default_str();
  app.add_option("--theta-loc", o.theta_loc, "Location recall threshold(s)")->capture_default_str();
  app.add_option("--theta-in", o.theta_in, "Sensory prediction threshold")->capture_default_str();
  app.add_option("--seed", o.seeds, "Seed(s)")->capture_default_str();
  app.add_option("--classifier", o.classifier, "gridcellnet or knn")->capture_default_str();
  app.add_option("--k", o.k, "k for the knn baseline")->capture_default_str();
  app.add_option("--test-offset", o.test_offset, "First test example")->capture_default_str();
  app.add_option("--test-limit", o.test_limit, "Maximum test examples")->capture_default_str();
  app.add_option("--threads", o.threads, "Evaluation threads, 0 for all cores");
  app.add_option("--out", o.out, "Output file (CSV, model, dataset or trace prefix)");
  app.add_option("--model", o.model, "Model snapshot to write (train) or read (eval)");
  app.add_option("--records", o.records, "Per-example result CSV (eval)");
  app.add_option("--example", o.examples, "Test example id(s) to trace");

  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  auto* train = app.add_subcommand("train", "Train on the first seed and save a model");
  auto* eval = app.add_subcommand("eval", "Accuracy per seed and setting, as CSV");
  auto* curve = app.add_subcommand("curve", "Cumulative accuracy against sensations, as CSV");
  auto* traces = app.add_subcommand("traces", "Export prediction traces");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) cmd_synth(o);
    if (*train) cmd_train(o);
    if (*eval) cmd_eval(o);
    if (*curve) cmd_curve(o);
    if (*traces) cmd_traces(o);
  } catch (const FormatError& e) {
    std::cerr << "error kind=format";
    if (e.record()) std::cerr << " record=" << *e.record();
    std::cerr << " offset=" << e.offset() << " message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error kind=invalid_argument message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error kind=out_of_range message=" << quoted(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error kind=runtime message=" << quoted(e.what()) << '\n';
    return 1;
  }
  return 0;
}
