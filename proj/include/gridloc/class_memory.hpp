#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gridloc/sdr.hpp"

namespace gridloc {

/// Per class and per sensor position, the location codes of every learned
/// example, plus their per-module union for subset queries.
///
/// Codes are flattened location vectors (module i's cell c at
/// i * cells_per_module + c) with exactly one cell per module.
class ClassMemory {
 public:
  ClassMemory() = default;
  ClassMemory(std::size_t num_modules, std::size_t cells_per_module,
              std::size_t num_positions = 25);

  std::size_t num_modules() const { return num_modules_; }
  std::size_t cells_per_module() const { return cells_per_module_; }
  std::size_t num_positions() const { return num_positions_; }

  /// `codes[m]` is the example's code at position m.
  void add(int label, std::span<const SparseBinaryVector> codes);

  std::vector<int> labels() const;
  std::size_t num_examples(int label) const;
  std::size_t total_examples() const;

  std::span<const SparseBinaryVector> codes(int label,
                                            std::size_t position) const;

  /// Per module, active cells of that module lie within the module's part of
  /// the class union at `position`; conjoined over modules.
  bool within_class(int label, std::size_t position,
                    const SparseBinaryVector& active) const;

 private:
  struct Entry {
    std::size_t examples = 0;
    std::vector<std::vector<SparseBinaryVector>> codes;  // [position][example]
    std::vector<std::vector<std::uint64_t>> unions;      // [position] bitset
  };

  const Entry& entry(int label) const;

  std::size_t num_modules_ = 0;
  std::size_t cells_per_module_ = 0;
  std::size_t num_positions_ = 0;
  std::map<int, Entry> classes_;
};

}  // namespace gridloc
