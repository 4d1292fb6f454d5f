#include "gridloc/knn.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gridloc {

SparseBinaryVector concatenate_features(const FeatureGrid& grid,
                                        std::span<const int> order,
                                        std::size_t prefix_len) {
  if (prefix_len == 0 || prefix_len > order.size()) {
    throw std::invalid_argument("prefix length must be in 1..order length");
  }
  std::vector<Index> bits;
  bits.reserve(prefix_len * kFeatureActive);
  for (std::size_t i = 0; i < prefix_len; ++i) {
    const auto offset = static_cast<Index>(i * kFeatureDim);
    for (Index b : grid.at(static_cast<std::size_t>(order[i]))) {
      bits.push_back(offset + b);
    }
  }
  return SparseBinaryVector::from_sorted_unchecked(prefix_len * kFeatureDim,
                                                   std::move(bits));
}

std::size_t hamming_distance(const SparseBinaryVector& a,
                             const SparseBinaryVector& b) {
  return a.cardinality() + b.cardinality() - 2 * overlap(a, b);
}

KnnClassifier::KnnClassifier(std::size_t k, std::size_t prefix_len)
    : k_(k), prefix_len_(prefix_len) {
  if (k_ == 0) throw std::invalid_argument("k must be at least 1");
  if (prefix_len_ == 0 || prefix_len_ > kNumPositions) {
    throw std::invalid_argument("prefix length must be in 1..25");
  }
}

void KnnClassifier::fit(std::span<const FeatureGrid> train,
                        std::span<const Order> orders) {
  if (train.size() != orders.size()) {
    throw std::invalid_argument("one order per training example required");
  }
  vectors_.clear();
  labels_.clear();
  for (std::size_t i = 0; i < train.size(); ++i) {
    vectors_.push_back(concatenate_features(train[i], orders[i], prefix_len_));
    labels_.push_back(train[i].label);
  }
}

int KnnClassifier::predict(const FeatureGrid& test,
                           std::span<const int> order) const {
  if (vectors_.empty()) throw std::logic_error("k-NN has no training data");
  const auto query = concatenate_features(test, order, prefix_len_);

  std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (distance, idx)
  ranked.reserve(vectors_.size());
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    ranked.emplace_back(hamming_distance(query, vectors_[i]), i);
  }
  const std::size_t k = std::min(k_, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(k),
                    ranked.end());

  struct Tally {
    std::size_t votes = 0;
    std::size_t distance_sum = 0;
  };
  std::map<int, Tally> tally;
  for (std::size_t i = 0; i < k; ++i) {
    auto& t = tally[labels_[ranked[i].second]];
    ++t.votes;
    t.distance_sum += ranked[i].first;
  }

  // std::map iterates labels ascending, so strict comparisons keep the
  // lowest label on a full tie. Mean distances compare by cross-multiplying.
  int best = tally.begin()->first;
  Tally best_t = tally.begin()->second;
  for (const auto& [label, t] : tally) {
    const bool more_votes = t.votes > best_t.votes;
    const bool closer = t.votes == best_t.votes &&
                        t.distance_sum * best_t.votes <
                            best_t.distance_sum * t.votes;
    if (more_votes || closer) {
      best = label;
      best_t = t;
    }
  }
  return best;
}

int knn_classify(std::span<const FeatureGrid> train, const FeatureGrid& test,
                 std::size_t k, std::size_t prefix_len) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  const auto raster = raster_order();
  std::vector<Order> orders(train.size(), raster);
  KnnClassifier knn(k, prefix_len);
  knn.fit(train, orders);
  return knn.predict(test, raster);
}

}  // namespace gridloc
