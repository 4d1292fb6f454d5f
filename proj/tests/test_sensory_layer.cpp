#include <doctest.h>

#include <set>

#include "gridloc/sensory_layer.hpp"
#include "oracles.hpp"

using namespace gridloc;

namespace {

const SensoryLayerShape kShape{};

SparseBinaryVector columns(std::initializer_list<Index> c) {
  return SparseBinaryVector(128, std::vector<Index>(c));
}

}  // namespace

TEST_CASE("segment store threshold counting") {
  SegmentStore store(10, 20);
  const auto s0 = store.add_segment(3, SparseBinaryVector(20, {1, 2, 3}));
  store.add_segment(5, SparseBinaryVector(20, {3, 4}));
  CHECK(store.num_segments() == 2);
  CHECK(store.owner(s0) == 3);
  CHECK(store.segments_of(3).size() == 1);
  CHECK(store.active_cells(SparseBinaryVector(20, {2, 3}), 2) == SparseBinaryVector(10, {3}));
  CHECK(store.active_cells(SparseBinaryVector(20, {3}), 1) == SparseBinaryVector(10, {3, 5}));
  store.grow_segment(s0, SparseBinaryVector(20, {1, 9}));
  CHECK(store.synapses(s0) == SparseBinaryVector(20, {1, 2, 3, 9}));
  CHECK(store.active_cells(SparseBinaryVector(20, {9}), 1) == SparseBinaryVector(10, {3}));
  CHECK_THROWS(store.add_segment(10, SparseBinaryVector(20)));
  CHECK_THROWS(store.add_segment(1, SparseBinaryVector(21)));
}

TEST_CASE("compute_predictive examples") {
  Rng rng(4);
  const std::size_t loc_dim = 40 * 2500;
  SensoryLayer layer(kShape, loc_dim);
  std::vector<Index> code;
  for (Index m = 0; m < 40; ++m) code.push_back(m * 2500 + (m * 37) % 2500);
  const SparseBinaryVector location(loc_dim, code);
  layer.segments().add_segment(77, location);

  CHECK(layer.compute_predictive(location, 20) == SparseBinaryVector(kShape.num_cells(), {77}));
  CHECK(layer.compute_predictive(SparseBinaryVector(loc_dim), 20).empty());
  CHECK(layer.compute_predictive(location, 40).cardinality() == 1);
  CHECK(layer.compute_predictive(location, 41).empty());
}

TEST_CASE("compute_predictive matches the exhaustive scan and is monotone") {
  Rng rng(12);
  const std::size_t loc_dim = 2000;
  std::uniform_int_distribution<Index> cell(0, static_cast<Index>(kShape.num_cells() - 1));
  for (int trial = 0; trial < 30; ++trial) {
    SensoryLayer layer(kShape, loc_dim);
    for (int s = 0; s < 400; ++s) layer.segments().add_segment(cell(rng), random_sdr(loc_dim, 40, rng));
    const auto loc = random_sdr(loc_dim, 300, rng);
    const std::size_t theta = 3 + trial % 6;
    const auto got = layer.compute_predictive(loc, theta);
    CHECK(oracle::to_set(got) == oracle::active_cells(layer.segments(), loc, theta));

    const auto more = set_union(loc, random_sdr(loc_dim, 200, rng));
    CHECK(is_subset(got, layer.compute_predictive(more, theta)));
  }
}

TEST_CASE("activate examples") {
  Rng rng(6);
  const auto input = random_sdr(128, 19, rng);

  const auto burst = activate(kShape, SparseBinaryVector(kShape.num_cells()), input);
  CHECK(burst.cardinality() == 608);

  std::vector<Index> one_each;
  for (Index c : input) one_each.push_back(kShape.cell_at(c, c % 32));
  const auto predicted = activate(kShape, SparseBinaryVector(kShape.num_cells(), one_each), input);
  CHECK(predicted.cardinality() == 19);
  CHECK(oracle::to_vec(oracle::to_set(predicted)) == one_each);

  // 7 columns with two predictive cells each, 12 unpredicted
  std::vector<Index> two_each;
  std::size_t k = 0;
  for (Index c : input) {
    if (k++ >= 7) break;
    two_each.push_back(kShape.cell_at(c, 3));
    two_each.push_back(kShape.cell_at(c, 30));
  }
  const SparseBinaryVector mixed_pred(kShape.num_cells(), two_each);
  const auto mixed = activate(kShape, mixed_pred, input);
  CHECK(mixed.cardinality() == 7 * 2 + 12 * 32);
  CHECK(oracle::to_set(mixed) ==
        oracle::burst_rule(128, 32, oracle::to_set(mixed_pred), oracle::to_set(input)));

  CHECK_THROWS_AS(activate(kShape, SparseBinaryVector(kShape.num_cells()), SparseBinaryVector(64)),
                  std::invalid_argument);
}

TEST_CASE("property: activation rule against the per-column oracle") {
  Rng rng(31);
  std::uniform_int_distribution<std::size_t> n_pred(0, 300);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto input = random_sdr(128, 19, rng);
    const auto predictive = random_sdr(kShape.num_cells(), n_pred(rng), rng);
    const auto active = activate(kShape, predictive, input);
    const auto expected =
        oracle::burst_rule(128, 32, oracle::to_set(predictive), oracle::to_set(input));
    CHECK(oracle::to_set(active) == expected);

    // active cells only in input columns, never more than a burst
    CHECK(is_subset(columns_of(kShape, active), input));
    for (Index c : input) {
      std::size_t in_column = 0;
      for (Index cell : active) in_column += kShape.column_of(cell) == c;
      CHECK(in_column >= 1);
      CHECK(in_column <= 32);
    }
  }
}

TEST_CASE("columns_of") {
  const SparseBinaryVector cells(kShape.num_cells(), {0, 31, 32, 4095});
  CHECK(columns_of(kShape, cells) == columns({0, 1, 127}));
}
