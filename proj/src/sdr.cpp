#include "gridloc/sdr.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gridloc {

namespace {

void require_same_dimension(const SparseBinaryVector& a,
                            const SparseBinaryVector& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("dimension mismatch: " +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
  }
}

}  // namespace

SparseBinaryVector::SparseBinaryVector(std::size_t dimension,
                                       std::vector<Index> active)
    : dimension_(dimension), active_(std::move(active)) {
  std::sort(active_.begin(), active_.end());
  if (std::adjacent_find(active_.begin(), active_.end()) != active_.end()) {
    throw std::invalid_argument("duplicate active index");
  }
  if (!active_.empty() && active_.back() >= dimension_) {
    throw std::invalid_argument("index " + std::to_string(active_.back()) +
                                " out of range for dimension " +
                                std::to_string(dimension_));
  }
}

SparseBinaryVector SparseBinaryVector::from_sorted_unchecked(
    std::size_t dimension, std::vector<Index> active) {
  SparseBinaryVector v(dimension);
  v.active_ = std::move(active);
  return v;
}

SparseBinaryVector SparseBinaryVector::full(std::size_t dimension) {
  std::vector<Index> all(dimension);
  std::iota(all.begin(), all.end(), Index{0});
  return from_sorted_unchecked(dimension, std::move(all));
}

bool SparseBinaryVector::contains(Index i) const {
  return std::binary_search(active_.begin(), active_.end(), i);
}

std::size_t overlap(const SparseBinaryVector& a, const SparseBinaryVector& b) {
  require_same_dimension(a, b);
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

bool is_subset(const SparseBinaryVector& a, const SparseBinaryVector& b) {
  require_same_dimension(a, b);
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

SparseBinaryVector set_union(const SparseBinaryVector& a,
                             const SparseBinaryVector& b) {
  require_same_dimension(a, b);
  std::vector<Index> out;
  out.reserve(a.cardinality() + b.cardinality());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return SparseBinaryVector::from_sorted_unchecked(a.dimension(),
                                                   std::move(out));
}

SparseBinaryVector set_union(std::span<const SparseBinaryVector> vs) {
  if (vs.empty()) {
    throw std::invalid_argument("union of an empty list");
  }
  std::vector<Index> all;
  for (const auto& v : vs) {
    require_same_dimension(vs.front(), v);
    all.insert(all.end(), v.begin(), v.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return SparseBinaryVector::from_sorted_unchecked(vs.front().dimension(),
                                                   std::move(all));
}

SparseBinaryVector random_sdr(std::size_t dimension, std::size_t k, Rng& rng) {
  if (k > dimension) {
    throw std::invalid_argument("random_sdr: k exceeds dimension");
  }
  // Partial Fisher-Yates over the index range.
  std::vector<Index> pool(dimension);
  std::iota(pool.begin(), pool.end(), Index{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, dimension - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return SparseBinaryVector::from_sorted_unchecked(dimension, std::move(pool));
}

}  // namespace gridloc
