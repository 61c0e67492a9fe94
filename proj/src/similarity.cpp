#include "prefshare/similarity.hpp"

#include <algorithm>
#include <cstdlib>

#include "prefshare/csv.hpp"

namespace prefshare {

namespace {

// Intersection size of two sorted vectors.
std::size_t intersection_size(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

SimilarityScore jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = intersection_size(a, b);
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

SimilarityScore jaccard_users(const UserId& u, const UserId& v, const LikesMatrix& likes) {
  return jaccard(likes.items_of(u), likes.items_of(v));
}

SimilarityScore jaccard_items(const ItemId& i, const ItemId& j, const LikesMatrix& likes) {
  return jaccard(likes.users_of(i), likes.users_of(j));
}

ItemSimilarityCache::ItemSimilarityCache(const LikesMatrix& likes) {
  std::vector<int> degree;
  for (const auto& [item, users] : likes.by_item()) {
    index_.emplace(item, static_cast<int>(degree.size()));
    degree.push_back(static_cast<int>(users.size()));
  }
  std::vector<std::map<int, int>> co(degree.size());
  std::vector<int> ids;
  for (const auto& [user, items] : likes.by_user()) {
    ids.clear();
    ids.reserve(items.size());
    for (const auto& item : items) ids.push_back(index_.at(item));
    std::sort(ids.begin(), ids.end());
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) ++co[ids[a]][ids[b]];
  }
  sims_.resize(degree.size());
  for (std::size_t a = 0; a < co.size(); ++a)
    for (const auto& [b, inter] : co[a]) {
      int uni = degree[a] + degree[b] - inter;
      sims_[a][b] = static_cast<double>(inter) / uni;
    }
}

SimilarityScore ItemSimilarityCache::similarity(const ItemId& i, const ItemId& j) const {
  auto ii = index_.find(i);
  auto ij = index_.find(j);
  if (ii == index_.end() || ij == index_.end()) return 0.0;
  int a = ii->second, b = ij->second;
  if (a == b) return 1.0;
  if (a > b) std::swap(a, b);
  auto it = sims_[a].find(b);
  return it == sims_[a].end() ? 0.0 : it->second;
}

void ItemSimilarityCache::dump(const std::filesystem::path& path) const {
  std::vector<const ItemId*> names(index_.size());
  for (const auto& [name, id] : index_) names[id] = &name;
  // index order is lexicographic, so pairs come out with item_i < item_j
  std::vector<std::vector<std::string>> rows;
  for (std::size_t a = 0; a < sims_.size(); ++a)
    for (const auto& [b, sim] : sims_[a])
      rows.push_back({*names[a], *names[b], csv::format_double(sim)});
  csv::write_table_atomic(path, {"item_i", "item_j", "similarity"}, rows);
}

ItemSimilarityCache ItemSimilarityCache::load(const std::filesystem::path& path) {
  auto table = csv::read_table(path, {"item_i", "item_j", "similarity"});
  ItemSimilarityCache cache;
  for (const auto& row : table.rows) {
    if (!(row[0] < row[1]))
      throw ValidationError(path.string() + ": cache rows must have item_i < item_j");
    cache.index_.emplace(row[0], 0);
    cache.index_.emplace(row[1], 0);
  }
  int next = 0;
  for (auto& [item, id] : cache.index_) id = next++;
  cache.sims_.resize(cache.index_.size());
  for (const auto& row : table.rows) {
    char* end = nullptr;
    double sim = std::strtod(row[2].c_str(), &end);
    if (end == row[2].c_str() || *end != '\0' || sim < 0.0 || sim > 1.0)
      throw ValidationError(path.string() + ": similarity out of [0,1]: '" + row[2] + "'");
    int a = cache.index_.at(row[0]);
    int b = cache.index_.at(row[1]);
    cache.sims_[a][b] = sim;
  }
  return cache;
}

SimilarityScore user_item_preference(const UserId& u, const ItemId& i, const LikesMatrix& likes,
                                     const ItemSimilarityCache* cache, bool exclude_self) {
  const auto& profile = likes.items_of(u);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& j : profile) {
    if (exclude_self && j == i) continue;
    sum += cache ? cache->similarity(i, j) : jaccard_items(i, j, likes);
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace prefshare
