#include "prefshare/recommender.hpp"

#include <algorithm>

namespace prefshare {

std::vector<std::pair<UserId, SimilarityScore>> top_k_friends(const UserId& u,
                                                              const std::set<UserId>& friends,
                                                              const LikesMatrix& likes,
                                                              std::size_t k) {
  if (k < 1) throw ContractError("top_k_friends requires k >= 1");
  std::vector<std::pair<UserId, SimilarityScore>> ranked;
  ranked.reserve(friends.size());
  for (const auto& f : friends) ranked.emplace_back(f, jaccard_users(u, f, likes));
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

double score_item(const std::vector<std::pair<UserId, SimilarityScore>>& neighbors,
                  const ItemId& item, const LikesMatrix& likes) {
  if (neighbors.empty()) throw ContractError("score_item requires a non-empty neighbor list");
  double num = 0.0, den = 0.0;
  for (const auto& [f, sim] : neighbors) {
    den += sim;
    if (likes.contains(f, item)) num += sim;
  }
  return den == 0.0 ? 0.0 : num / den;
}

RecommendationList recommend(const UserId& u, const std::set<UserId>& friends,
                             const LikesMatrix& likes, std::size_t k, std::size_t n) {
  if (n < 1) throw ContractError("recommend requires n >= 1");
  RecommendationList out{u, {}};
  if (friends.empty()) return out;
  auto neighbors = top_k_friends(u, friends, likes, k);
  double den = 0.0;
  for (const auto& [f, sim] : neighbors) den += sim;
  if (den == 0.0) return out;

  // Candidates: items liked by at least one selected neighbor; anything else
  // scores 0 and is never competitive.
  std::set<ItemId> candidates;
  for (const auto& [f, sim] : neighbors)
    for (const auto& item : likes.items_of(f)) candidates.insert(item);

  for (const auto& item : candidates) {
    if (likes.contains(u, item)) continue;
    out.entries.emplace_back(item, score_item(neighbors, item, likes));
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.entries.size() > n) out.entries.resize(n);
  return out;
}

}  // namespace prefshare
