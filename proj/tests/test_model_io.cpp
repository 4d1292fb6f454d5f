#include <doctest.h>

#include <filesystem>

#include "gridloc/dataset.hpp"
#include "gridloc/inference.hpp"
#include "gridloc/learning.hpp"
#include "gridloc/model_io.hpp"

using namespace gridloc;

TEST_CASE("model snapshot round trip") {
  Network net(NetworkParams{}, 3);
  Rng data(4);
  const auto grids = generate_synthetic_objects(4, 2, 20, data);
  Rng rng(5);
  for (const auto& g : grids) train_example(g, raster_order(), rng, net);

  const auto bytes = encode_model(net);
  const auto back = decode_model(bytes);
  CHECK(encode_model(back) == bytes);
  CHECK(back.location_segments().num_segments() == net.location_segments().num_segments());
  CHECK(back.sensory().segments().num_segments() == net.sensory().segments().num_segments());
  CHECK(back.memory().total_examples() == 8);
  for (std::size_t m = 0; m < net.modules().size(); ++m) {
    CHECK(back.modules()[m].scale == net.modules()[m].scale);
    CHECK(back.modules()[m].orientation == net.modules()[m].orientation);
  }
  Rng orders(6);
  for (const auto& g : grids) {
    Order o = raster_order();
    std::shuffle(o.begin(), o.end(), orders);
    const auto a = run_inference(net, g, o);
    const auto b = run_inference(back, g, o);
    CHECK(a.status == b.status);
    CHECK(a.sensations_used == b.sensations_used);
    CHECK(a.predicted_class == b.predicted_class);
  }

  const auto path = std::filesystem::temp_directory_path() / "gridloc_test_model.glmd";
  save_model(path, net);
  CHECK(encode_model(load_model(path)) == bytes);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt snapshots") {
  Network net(NetworkParams{}, 3);
  Rng data(4);
  Rng rng(5);
  train_example(generate_synthetic_objects(1, 1, 25, data).front(), raster_order(), rng, net);
  auto bytes = encode_model(net);
  CHECK_THROWS_AS(decode_model(std::span(bytes.data(), bytes.size() - 3)), FormatError);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_model(bad), FormatError);
  bad = bytes;
  bad.push_back(1);
  CHECK_THROWS_AS(decode_model(bad), FormatError);
}
