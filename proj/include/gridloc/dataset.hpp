#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridloc/feature_grid.hpp"

namespace gridloc {

/// Malformed feature-grid or model file. `record` is the zero-based example
/// (or line) index, absent for header problems; `offset` is the byte offset
/// (or line number for JSON-lines input).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::optional<std::size_t> record,
              std::size_t offset);

  std::optional<std::size_t> record() const { return record_; }
  std::size_t offset() const { return offset_; }

 private:
  std::optional<std::size_t> record_;
  std::size_t offset_;
};

// FGRD layout, all integers little-endian:
//   "FGRD" | u16 version=1 | u32 count | u16 grid_side=5 | u16 dim=128 | u16 k=19
//   then per example: u8 label, 25 x 19 u16 ascending indices.
inline constexpr std::uint16_t kFgrdVersion = 1;
inline constexpr std::size_t kFgrdHeaderBytes = 16;
inline constexpr std::size_t kFgrdRecordBytes =
    1 + kNumPositions * kFeatureActive * 2;

std::vector<std::uint8_t> encode_fgrd(std::span<const FeatureGrid> grids);
std::vector<FeatureGrid> decode_fgrd(std::span<const std::uint8_t> bytes,
                                     GridSource source = GridSource::Encoded);

/// One example per line: {"label": 3, "features": [[...19 indices], x25]}.
std::string encode_jsonl(std::span<const FeatureGrid> grids);
std::vector<FeatureGrid> decode_jsonl(std::string_view text,
                                      GridSource source = GridSource::Encoded);

void save_fgrd(const std::filesystem::path& path,
               std::span<const FeatureGrid> grids);
void save_jsonl(const std::filesystem::path& path,
                std::span<const FeatureGrid> grids);

/// Reads either format, sniffing the FGRD magic.
std::vector<FeatureGrid> load_feature_grids(
    const std::filesystem::path& path, GridSource source = GridSource::Encoded);

struct SyntheticSpec {
  std::size_t num_classes = 10;
  std::size_t pool_size = 250;
  // Probability that an example swaps a position's feature for a random
  // pool feature.
  double perturbation = 0.0;
};

/// A pool of random 19-of-128 features and, per class, a characteristic
/// pool feature at each of the 25 positions. Classes draw without
/// replacement when the pool is large enough, otherwise with replacement.
class SyntheticObjects {
 public:
  SyntheticObjects(const SyntheticSpec& spec, Rng& rng);

  const SyntheticSpec& spec() const { return spec_; }
  std::span<const SparseBinaryVector> pool() const { return pool_; }
  std::span<const std::size_t> assignment(int label) const;

  FeatureGrid prototype(int label) const;
  FeatureGrid sample(int label, Rng& rng) const;

  /// Class-major: all examples of class 0, then class 1, ...
  std::vector<FeatureGrid> generate(std::size_t examples_per_class,
                                    Rng& rng) const;

 private:
  SyntheticSpec spec_;
  std::vector<SparseBinaryVector> pool_;
  std::vector<std::vector<std::size_t>> assignments_;
};

std::vector<FeatureGrid> generate_synthetic_objects(
    std::size_t num_classes, std::size_t examples_per_class,
    std::size_t feature_pool_size, Rng& rng, double perturbation = 0.0);

enum class ProtocolKind { Fixed, Arbitrary, Partial };

struct SequenceProtocol {
  ProtocolKind kind = ProtocolKind::Fixed;
  std::size_t length = kNumPositions;  // sensations per test sequence

  std::string to_string() const;
};

/// "fixed", "arbitrary" or "partial:N" with N in 1..25.
SequenceProtocol parse_protocol(std::string_view text);

/// Traversal orders for one run. Fixed hands out one shared permutation for
/// every training and test example; Arbitrary draws a fresh permutation per
/// call; Partial is Arbitrary with test orders cut to the first N positions.
class OrderSource {
 public:
  OrderSource(SequenceProtocol protocol, std::uint64_t seed);

  Order training_order();
  Order test_order();

 private:
  Order shuffled();

  SequenceProtocol protocol_;
  Rng rng_;
  Order fixed_;
};

}  // namespace gridloc
