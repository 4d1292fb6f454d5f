#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridloc/feature_grid.hpp"

namespace gridloc {

/// The first `prefix_len` features of `order`, concatenated into one
/// prefix_len * 128 bit vector. No position information is kept.
SparseBinaryVector concatenate_features(const FeatureGrid& grid,
                                        std::span<const int> order,
                                        std::size_t prefix_len);

std::size_t hamming_distance(const SparseBinaryVector& a,
                             const SparseBinaryVector& b);

/// Hamming-distance k-nearest-neighbour baseline over concatenated features.
///
/// Vote ties go to the tied class with the smallest mean neighbour distance,
/// then to the lowest label. Neighbours at equal distance are taken in
/// training order.
class KnnClassifier {
 public:
  explicit KnnClassifier(std::size_t k, std::size_t prefix_len = kNumPositions);

  /// `orders[i]` is the sequence in which training example i was presented.
  void fit(std::span<const FeatureGrid> train, std::span<const Order> orders);

  int predict(const FeatureGrid& test, std::span<const int> order) const;

  std::size_t k() const { return k_; }
  std::size_t prefix_len() const { return prefix_len_; }

 private:
  std::size_t k_;
  std::size_t prefix_len_;
  std::vector<SparseBinaryVector> vectors_;
  std::vector<int> labels_;
};

/// All examples in raster order.
int knn_classify(std::span<const FeatureGrid> train, const FeatureGrid& test,
                 std::size_t k, std::size_t prefix_len = kNumPositions);

}  // namespace gridloc
