#include "gridloc/class_memory.hpp"

#include <stdexcept>
#include <string>

namespace gridloc {

ClassMemory::ClassMemory(std::size_t num_modules, std::size_t cells_per_module,
                         std::size_t num_positions)
    : num_modules_(num_modules),
      cells_per_module_(cells_per_module),
      num_positions_(num_positions) {}

void ClassMemory::add(int label, std::span<const SparseBinaryVector> codes) {
  if (codes.size() != num_positions_) {
    throw std::invalid_argument("expected a code for every position");
  }
  const std::size_t dim = num_modules_ * cells_per_module_;
  for (const auto& code : codes) {
    if (code.dimension() != dim || code.cardinality() != num_modules_) {
      throw std::invalid_argument("location code must have one cell per module");
    }
    std::size_t expected_module = 0;
    for (Index c : code) {
      if (c / cells_per_module_ != expected_module++) {
        throw std::invalid_argument(
            "location code must have one cell per module");
      }
    }
  }

  auto& e = classes_[label];
  if (e.codes.empty()) {
    e.codes.resize(num_positions_);
    e.unions.assign(num_positions_,
                    std::vector<std::uint64_t>((dim + 63) / 64, 0));
  }
  for (std::size_t m = 0; m < num_positions_; ++m) {
    e.codes[m].push_back(codes[m]);
    for (Index c : codes[m]) e.unions[m][c / 64] |= std::uint64_t{1} << (c % 64);
  }
  ++e.examples;
}

std::vector<int> ClassMemory::labels() const {
  std::vector<int> out;
  for (const auto& [label, _] : classes_) out.push_back(label);
  return out;
}

std::size_t ClassMemory::num_examples(int label) const {
  auto it = classes_.find(label);
  return it == classes_.end() ? 0 : it->second.examples;
}

std::size_t ClassMemory::total_examples() const {
  std::size_t n = 0;
  for (const auto& [_, e] : classes_) n += e.examples;
  return n;
}

const ClassMemory::Entry& ClassMemory::entry(int label) const {
  auto it = classes_.find(label);
  if (it == classes_.end()) {
    throw std::out_of_range("unknown class " + std::to_string(label));
  }
  return it->second;
}

std::span<const SparseBinaryVector> ClassMemory::codes(
    int label, std::size_t position) const {
  return entry(label).codes.at(position);
}

bool ClassMemory::within_class(int label, std::size_t position,
                               const SparseBinaryVector& active) const {
  if (active.dimension() != num_modules_ * cells_per_module_) {
    throw std::invalid_argument("location activity dimension mismatch");
  }
  const auto& bits = entry(label).unions.at(position);
  auto it = active.begin();
  for (std::size_t module = 0; module < num_modules_; ++module) {
    const auto end = static_cast<Index>((module + 1) * cells_per_module_);
    for (; it != active.end() && *it < end; ++it) {
      if (!(bits[*it / 64] >> (*it % 64) & 1U)) return false;
    }
  }
  return true;
}

}  // namespace gridloc
