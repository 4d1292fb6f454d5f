#include "gridloc/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "byte_io.hpp"
#include "gridloc/dataset.hpp"
#include "gridloc/learning.hpp"

namespace gridloc {

std::vector<std::uint8_t> encode_model(const Network& network) {
  const auto& p = network.params();
  detail::ByteWriter w;
  for (char c : std::string_view("GLMD")) w.put(static_cast<std::uint8_t>(c));
  w.put(kModelVersion);
  for (std::size_t v : {p.num_modules, p.lattice_side, p.sensory.num_columns,
                        p.sensory.cells_per_column, p.feature_active,
                        p.theta_in, p.theta_loc}) {
    w.put(static_cast<std::uint32_t>(v));
  }
  w.put_f64(p.min_scale);
  w.put_f64(p.max_scale);
  for (const auto& m : network.modules()) {
    w.put_f64(m.scale);
    w.put_f64(m.orientation);
  }
  w.put(static_cast<std::uint32_t>(network.learned().size()));
  for (const auto& obj : network.learned()) {
    w.put(static_cast<std::uint8_t>(obj.label));
    for (int pos : obj.order) w.put(static_cast<std::uint8_t>(pos));
    for (std::size_t pos = 0; pos < kNumPositions; ++pos) {
      for (Index c : obj.location_codes[pos]) w.put(static_cast<std::uint32_t>(c));
      for (Index c : obj.sensory_cells[pos]) w.put(static_cast<std::uint32_t>(c));
    }
  }
  return std::move(w.bytes());
}

Network decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || !std::equal(bytes.begin(), bytes.begin() + 4, "GLMD")) {
    throw FormatError("bad model magic", std::nullopt, 0);
  }
  detail::ByteReader r(bytes);
  std::size_t record_index = 0;
  bool in_records = false;
  try {
    r.get<std::uint32_t>();
    const auto version = r.get<std::uint16_t>();
    if (version != kModelVersion) {
      throw FormatError("unsupported model version", std::nullopt, 4);
    }
    NetworkParams p;
    p.num_modules = r.get<std::uint32_t>();
    p.lattice_side = r.get<std::uint32_t>();
    p.sensory.num_columns = r.get<std::uint32_t>();
    p.sensory.cells_per_column = r.get<std::uint32_t>();
    p.feature_active = r.get<std::uint32_t>();
    p.theta_in = r.get<std::uint32_t>();
    p.theta_loc = r.get<std::uint32_t>();
    p.min_scale = r.get_f64();
    p.max_scale = r.get_f64();

    std::vector<GridModuleConfig> modules(p.num_modules);
    for (auto& m : modules) {
      m.scale = r.get_f64();
      m.orientation = r.get_f64();
      m.lattice_side = p.lattice_side;
    }
    Network network(p, std::move(modules));

    const auto count = r.get<std::uint32_t>();
    in_records = true;
    for (; record_index < count; ++record_index) {
      LearnedObject obj;
      obj.label = r.get<std::uint8_t>();
      obj.order.resize(kNumPositions);
      for (auto& pos : obj.order) pos = r.get<std::uint8_t>();
      for (std::size_t pos = 0; pos < kNumPositions; ++pos) {
        std::vector<Index> loc(p.num_modules);
        for (auto& c : loc) c = r.get<std::uint32_t>();
        std::vector<Index> sen(p.feature_active);
        for (auto& c : sen) c = r.get<std::uint32_t>();
        obj.location_codes.emplace_back(network.location_dimension(),
                                        std::move(loc));
        obj.sensory_cells.emplace_back(p.sensory.num_cells(), std::move(sen));
      }
      replay_learned(obj, network);
    }
    if (r.remaining() != 0) {
      throw FormatError("trailing bytes after last object", std::nullopt,
                        r.offset());
    }
    return network;
  } catch (const detail::ShortRead&) {
    throw FormatError("truncated model",
                      in_records ? std::optional(record_index) : std::nullopt,
                      r.offset());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what(),
                      in_records ? std::optional(record_index) : std::nullopt,
                      r.offset());
  }
}

void save_model(const std::filesystem::path& path, const Network& network) {
  const auto bytes = encode_model(network);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Network load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return decode_model(bytes);
}

}  // namespace gridloc
