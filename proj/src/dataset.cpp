#include "gridloc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "byte_io.hpp"

namespace gridloc {

namespace {

std::string describe(const std::string& what, std::optional<std::size_t> record,
                     std::size_t offset) {
  std::ostringstream os;
  if (record) os << "record " << *record << ", ";
  os << "offset " << offset << ": " << what;
  return os.str();
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void check_cell(const std::vector<Index>& indices, std::size_t record,
                std::size_t offset) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= kFeatureDim) {
      throw FormatError("index out of range (" + std::to_string(indices[i]) +
                            ")",
                        record, offset);
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw FormatError(indices[i] == indices[i - 1] ? "duplicate index"
                                                     : "indices not ascending",
                        record, offset);
    }
  }
}

}  // namespace

FormatError::FormatError(const std::string& what,
                         std::optional<std::size_t> record, std::size_t offset)
    : std::runtime_error(describe(what, record, offset)),
      record_(record),
      offset_(offset) {}

std::vector<std::uint8_t> encode_fgrd(std::span<const FeatureGrid> grids) {
  detail::ByteWriter w;
  w.put_bytes(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>("FGRD"), 4));
  w.put(kFgrdVersion);
  w.put(static_cast<std::uint32_t>(grids.size()));
  w.put(static_cast<std::uint16_t>(kGridSide));
  w.put(static_cast<std::uint16_t>(kFeatureDim));
  w.put(static_cast<std::uint16_t>(kFeatureActive));
  for (const auto& g : grids) {
    validate(g);
    w.put(static_cast<std::uint8_t>(g.label));
    for (const auto& f : g.features) {
      for (Index i : f) w.put(static_cast<std::uint16_t>(i));
    }
  }
  return std::move(w.bytes());
}

std::vector<FeatureGrid> decode_fgrd(std::span<const std::uint8_t> bytes,
                                     GridSource source) {
  if (bytes.size() < kFgrdHeaderBytes) {
    throw FormatError("truncated header", std::nullopt, bytes.size());
  }
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "FGRD")) {
    throw FormatError("bad magic", std::nullopt, 0);
  }
  detail::ByteReader r(bytes.subspan(4));
  const auto version = r.get<std::uint16_t>();
  if (version != kFgrdVersion) {
    throw FormatError("unsupported version " + std::to_string(version),
                      std::nullopt, 4);
  }
  const auto count = r.get<std::uint32_t>();
  const auto side = r.get<std::uint16_t>();
  const auto dim = r.get<std::uint16_t>();
  const auto k = r.get<std::uint16_t>();
  if (side != kGridSide || dim != kFeatureDim || k != kFeatureActive) {
    throw FormatError("unsupported geometry (side " + std::to_string(side) +
                          ", dim " + std::to_string(dim) + ", k " +
                          std::to_string(k) + ")",
                      std::nullopt, 10);
  }

  std::vector<FeatureGrid> grids;
  grids.reserve(count);
  for (std::size_t rec = 0; rec < count; ++rec) {
    const std::size_t start = kFgrdHeaderBytes + rec * kFgrdRecordBytes;
    if (bytes.size() < start + kFgrdRecordBytes) {
      throw FormatError("truncated record", rec,
                        std::min(start, bytes.size()));
    }
    detail::ByteReader rr(bytes.subspan(start, kFgrdRecordBytes));
    FeatureGrid g;
    g.source = source;
    g.label = rr.get<std::uint8_t>();
    for (std::size_t p = 0; p < kNumPositions; ++p) {
      const std::size_t cell_offset = start + rr.offset();
      std::vector<Index> idx(kFeatureActive);
      for (auto& i : idx) i = rr.get<std::uint16_t>();
      check_cell(idx, rec, cell_offset);
      g.features[p] =
          SparseBinaryVector::from_sorted_unchecked(kFeatureDim, std::move(idx));
    }
    grids.push_back(std::move(g));
  }
  const std::size_t end = kFgrdHeaderBytes + count * kFgrdRecordBytes;
  if (bytes.size() != end) {
    throw FormatError("trailing bytes after last record", std::nullopt, end);
  }
  return grids;
}

std::string encode_jsonl(std::span<const FeatureGrid> grids) {
  std::string out;
  for (const auto& g : grids) {
    validate(g);
    nlohmann::json j;
    j["label"] = g.label;
    auto& features = j["features"] = nlohmann::json::array();
    for (const auto& f : g.features) {
      features.push_back(std::vector<Index>(f.begin(), f.end()));
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<FeatureGrid> decode_jsonl(std::string_view text, GridSource source) {
  std::vector<FeatureGrid> grids;
  std::size_t line_no = 0;
  std::size_t record = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line =
        text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    FeatureGrid g;
    g.source = source;
    try {
      const auto j = nlohmann::json::parse(line);
      const int label = j.at("label").get<int>();
      if (label < 0 || label > 255) {
        throw FormatError("label out of range", record, line_no);
      }
      g.label = label;
      const auto& features = j.at("features");
      if (!features.is_array() || features.size() != kNumPositions) {
        throw FormatError("expected 25 feature arrays", record, line_no);
      }
      for (std::size_t p = 0; p < kNumPositions; ++p) {
        auto idx = features[p].get<std::vector<Index>>();
        if (idx.size() != kFeatureActive) {
          throw FormatError("expected 19 indices per feature", record, line_no);
        }
        check_cell(idx, record, line_no);
        g.features[p] = SparseBinaryVector::from_sorted_unchecked(
            kFeatureDim, std::move(idx));
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(e.what(), record, line_no);
    }
    grids.push_back(std::move(g));
    ++record;
  }
  return grids;
}

void save_fgrd(const std::filesystem::path& path,
               std::span<const FeatureGrid> grids) {
  write_file(path, encode_fgrd(grids));
}

void save_jsonl(const std::filesystem::path& path,
                std::span<const FeatureGrid> grids) {
  const auto text = encode_jsonl(grids);
  write_file(path, std::span<const std::uint8_t>(
                       reinterpret_cast<const std::uint8_t*>(text.data()),
                       text.size()));
}

std::vector<FeatureGrid> load_feature_grids(const std::filesystem::path& path,
                                            GridSource source) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, "FGRD")) {
    return decode_fgrd(bytes, source);
  }
  return decode_jsonl(
      std::string_view(reinterpret_cast<const char*>(bytes.data()),
                       bytes.size()),
      source);
}

SyntheticObjects::SyntheticObjects(const SyntheticSpec& spec, Rng& rng)
    : spec_(spec) {
  if (spec.pool_size == 0) {
    throw std::invalid_argument("feature pool must not be empty");
  }
  if (spec.num_classes == 0 || spec.num_classes > 256) {
    throw std::invalid_argument("number of classes must be in 1..256");
  }
  if (!(spec.perturbation >= 0.0 && spec.perturbation <= 1.0)) {
    throw std::invalid_argument("perturbation must be a probability");
  }

  std::set<std::vector<Index>> seen;
  while (pool_.size() < spec.pool_size) {
    auto f = random_sdr(kFeatureDim, kFeatureActive, rng);
    if (seen.emplace(f.begin(), f.end()).second) pool_.push_back(std::move(f));
  }

  const std::size_t slots = spec.num_classes * kNumPositions;
  std::vector<std::size_t> draws(slots);
  if (spec.pool_size >= slots) {
    std::vector<std::size_t> all(spec.pool_size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::copy_n(all.begin(), slots, draws.begin());
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, spec.pool_size - 1);
    for (auto& d : draws) d = pick(rng);
  }
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    assignments_.emplace_back(draws.begin() + static_cast<long>(c * kNumPositions),
                              draws.begin() +
                                  static_cast<long>((c + 1) * kNumPositions));
  }
}

std::span<const std::size_t> SyntheticObjects::assignment(int label) const {
  return assignments_.at(static_cast<std::size_t>(label));
}

FeatureGrid SyntheticObjects::prototype(int label) const {
  FeatureGrid g;
  g.label = label;
  g.source = GridSource::Synthetic;
  const auto a = assignment(label);
  for (std::size_t p = 0; p < kNumPositions; ++p) g.features[p] = pool_[a[p]];
  return g;
}

FeatureGrid SyntheticObjects::sample(int label, Rng& rng) const {
  auto g = prototype(label);
  if (spec_.perturbation <= 0.0) return g;
  std::bernoulli_distribution swap(spec_.perturbation);
  std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
  for (auto& f : g.features) {
    if (swap(rng)) f = pool_[pick(rng)];
  }
  return g;
}

std::vector<FeatureGrid> SyntheticObjects::generate(
    std::size_t examples_per_class, Rng& rng) const {
  std::vector<FeatureGrid> out;
  out.reserve(spec_.num_classes * examples_per_class);
  for (std::size_t c = 0; c < spec_.num_classes; ++c) {
    for (std::size_t e = 0; e < examples_per_class; ++e) {
      out.push_back(sample(static_cast<int>(c), rng));
    }
  }
  return out;
}

std::vector<FeatureGrid> generate_synthetic_objects(
    std::size_t num_classes, std::size_t examples_per_class,
    std::size_t feature_pool_size, Rng& rng, double perturbation) {
  SyntheticObjects objects({num_classes, feature_pool_size, perturbation}, rng);
  return objects.generate(examples_per_class, rng);
}

std::string SequenceProtocol::to_string() const {
  switch (kind) {
    case ProtocolKind::Fixed:
      return "fixed";
    case ProtocolKind::Arbitrary:
      return "arbitrary";
    case ProtocolKind::Partial:
      return "partial:" + std::to_string(length);
  }
  return "unknown";
}

SequenceProtocol parse_protocol(std::string_view text) {
  if (text == "fixed") return {ProtocolKind::Fixed, kNumPositions};
  if (text == "arbitrary") return {ProtocolKind::Arbitrary, kNumPositions};
  constexpr std::string_view prefix = "partial:";
  if (text.starts_with(prefix)) {
    const auto digits = text.substr(prefix.size());
    std::size_t n = 0;
    const auto [end, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && end == digits.data() + digits.size() && n >= 1 &&
        n <= kNumPositions) {
      return {ProtocolKind::Partial, n};
    }
  }
  throw std::invalid_argument("unknown protocol '" + std::string(text) +
                              "' (expected fixed, arbitrary or partial:N)");
}

OrderSource::OrderSource(SequenceProtocol protocol, std::uint64_t seed)
    : protocol_(protocol), rng_(seed) {
  if (protocol_.kind == ProtocolKind::Fixed) fixed_ = shuffled();
}

Order OrderSource::shuffled() {
  auto o = raster_order();
  std::shuffle(o.begin(), o.end(), rng_);
  return o;
}

Order OrderSource::training_order() {
  return protocol_.kind == ProtocolKind::Fixed ? fixed_ : shuffled();
}

Order OrderSource::test_order() {
  if (protocol_.kind == ProtocolKind::Fixed) return fixed_;
  auto o = shuffled();
  if (protocol_.kind == ProtocolKind::Partial) o.resize(protocol_.length);
  return o;
}

}  // namespace gridloc
