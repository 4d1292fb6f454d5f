#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace gridloc {

using Index = std::uint32_t;
using Rng = std::mt19937_64;

/// A fixed-dimension binary vector stored as its sorted set of active indices.
///
/// The same type carries feature vectors (128 bits), lattice activity
/// (2500 cells per module), flattened location codes and dendritic synapse
/// sets. Values never change after construction.
class SparseBinaryVector {
 public:
  SparseBinaryVector() = default;
  explicit SparseBinaryVector(std::size_t dimension) : dimension_(dimension) {}

  // Indices may arrive in any order; duplicates or out-of-range indices throw
  // std::invalid_argument.
  SparseBinaryVector(std::size_t dimension, std::vector<Index> active);
  SparseBinaryVector(std::size_t dimension, std::initializer_list<Index> active)
      : SparseBinaryVector(dimension, std::vector<Index>(active)) {}

  // Skips validation; caller guarantees sorted, unique, in range.
  static SparseBinaryVector from_sorted_unchecked(std::size_t dimension,
                                                  std::vector<Index> active);

  static SparseBinaryVector full(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t cardinality() const { return active_.size(); }
  bool empty() const { return active_.empty(); }
  std::span<const Index> active() const { return active_; }
  bool contains(Index i) const;

  auto begin() const { return active_.begin(); }
  auto end() const { return active_.end(); }

  friend bool operator==(const SparseBinaryVector&,
                         const SparseBinaryVector&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Index> active_;
};

// Throw std::invalid_argument on dimension mismatch.
std::size_t overlap(const SparseBinaryVector& a, const SparseBinaryVector& b);
bool is_subset(const SparseBinaryVector& a, const SparseBinaryVector& b);
SparseBinaryVector set_union(std::span<const SparseBinaryVector> vs);
SparseBinaryVector set_union(const SparseBinaryVector& a,
                             const SparseBinaryVector& b);

/// Exactly k distinct indices drawn uniformly from [0, dimension).
SparseBinaryVector random_sdr(std::size_t dimension, std::size_t k, Rng& rng);

}  // namespace gridloc
