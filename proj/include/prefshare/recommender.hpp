#pragma once

#include <set>
#include <vector>

#include "prefshare/core.hpp"
#include "prefshare/similarity.hpp"

namespace prefshare {

struct RecommendationList {
  UserId user;
  std::vector<std::pair<ItemId, double>> entries;  // descending score, ties by id
};

// The k friends most similar to u by Jaccard over like profiles; fewer if
// the friend set is smaller. Ties break by ascending user id.
std::vector<std::pair<UserId, SimilarityScore>> top_k_friends(const UserId& u,
                                                              const std::set<UserId>& friends,
                                                              const LikesMatrix& likes,
                                                              std::size_t k);

// Similarity-weighted popularity of the item among the neighbors:
// sum_j sim_j * likes(f_j, item) / sum_j sim_j, and 0 when the denominator is 0.
double score_item(const std::vector<std::pair<UserId, SimilarityScore>>& neighbors,
                  const ItemId& item, const LikesMatrix& likes);

// Top-n items by score over the union of the selected neighbors' likes,
// excluding items u already likes. Score ties break by ascending item id.
// Users whose neighbors are all dissimilar (zero denominator) get an empty
// list rather than a division by zero.
RecommendationList recommend(const UserId& u, const std::set<UserId>& friends,
                             const LikesMatrix& likes, std::size_t k = 20, std::size_t n = 10);

}  // namespace prefshare
