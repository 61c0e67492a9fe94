#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "prefshare/core.hpp"

namespace prefshare {

// All scores are in [0,1]. Jaccard of two empty sets is defined as 0: an
// empty profile carries no evidence of similarity.
using SimilarityScore = double;

SimilarityScore jaccard_users(const UserId& u, const UserId& v, const LikesMatrix& likes);
SimilarityScore jaccard_items(const ItemId& i, const ItemId& j, const LikesMatrix& likes);

// Exact item-item Jaccard cache built from per-user co-occurrence counts.
// Read-only once built. Pairs with no co-likers are not materialized and
// score 0 on lookup; a known item is self-similar with score 1.
class ItemSimilarityCache {
 public:
  ItemSimilarityCache() = default;
  explicit ItemSimilarityCache(const LikesMatrix& likes);

  SimilarityScore similarity(const ItemId& i, const ItemId& j) const;

  // CSV triples item_i,item_j,similarity with i < j lexicographically;
  // loading validates every value against [0,1].
  void dump(const std::filesystem::path& path) const;
  static ItemSimilarityCache load(const std::filesystem::path& path);

 private:
  std::map<ItemId, int> index_;
  std::vector<std::map<int, double>> sims_;  // upper triangle, nonzero entries
};

// Mean Jaccard similarity between item i and the items the user likes;
// 0 for an empty profile. When i itself is in the profile its self-similarity
// term (1.0) is included unless exclude_self is set.
SimilarityScore user_item_preference(const UserId& u, const ItemId& i, const LikesMatrix& likes,
                                     const ItemSimilarityCache* cache = nullptr,
                                     bool exclude_self = false);

}  // namespace prefshare
