#include "prefshare/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace prefshare {

namespace {

const std::vector<std::string> kEmptyList;

// Insert into a sorted vector, ignoring duplicates. Returns true if inserted.
bool sorted_insert(std::vector<std::string>& v, const std::string& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

bool sorted_contains(const std::vector<std::string>& v, const std::string& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace

Rating Rating::from_half_units(int hu) {
  if (hu < 1 || hu > 10)
    throw ValidationError("rating off the half-step grid: " + std::to_string(hu * 0.5));
  return Rating(hu);
}

Rating Rating::parse(const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw ValidationError("unparseable rating: '" + text + "'");
  double hu = v * 2.0;
  double rounded = std::round(hu);
  if (std::abs(hu - rounded) > 1e-9)
    throw ValidationError("rating off the half-step grid: '" + text + "'");
  return from_half_units(static_cast<int>(rounded));
}

std::string Rating::to_string() const {
  std::string s = std::to_string(half_units_ / 2);
  s += (half_units_ % 2) ? ".5" : ".0";
  return s;
}

void LikesMatrix::add(const UserId& user, const ItemId& item) {
  if (user.empty() || item.empty()) throw ValidationError("empty id in likes entry");
  if (sorted_insert(by_user_[user], item)) {
    sorted_insert(by_item_[item], user);
    ++n_likes_;
  }
}

bool LikesMatrix::contains(const UserId& user, const ItemId& item) const {
  auto it = by_user_.find(user);
  return it != by_user_.end() && sorted_contains(it->second, item);
}

const std::vector<ItemId>& LikesMatrix::items_of(const UserId& user) const {
  auto it = by_user_.find(user);
  return it == by_user_.end() ? kEmptyList : it->second;
}

const std::vector<UserId>& LikesMatrix::users_of(const ItemId& item) const {
  auto it = by_item_.find(item);
  return it == by_item_.end() ? kEmptyList : it->second;
}

bool LikesMatrix::transpose_consistent() const {
  std::size_t forward = 0;
  for (const auto& [user, items] : by_user_) {
    forward += items.size();
    for (const auto& item : items)
      if (!sorted_contains(users_of(item), user)) return false;
  }
  std::size_t backward = 0;
  for (const auto& [item, users] : by_item_) {
    backward += users.size();
    for (const auto& user : users)
      if (!sorted_contains(items_of(user), item)) return false;
  }
  return forward == backward && forward == n_likes_;
}

void RatingsTable::add(const UserId& user, const ItemId& item, Rating rating) {
  if (user.empty() || item.empty()) throw ValidationError("empty id in rating entry");
  auto [it, inserted] = entries_.emplace(std::make_pair(user, item), rating);
  if (!inserted)
    throw ValidationError("duplicate rating for (" + user + ", " + item + ")");
}

const Rating* RatingsTable::find(const UserId& user, const ItemId& item) const {
  auto it = entries_.find(std::make_pair(user, item));
  return it == entries_.end() ? nullptr : &it->second;
}

void ItemMeta::validate() const {
  if (item.empty()) throw ValidationError("item meta with empty id");
  if (!(ext_rating >= 1.0 && ext_rating <= 10.0))
    throw ValidationError("ext_rating out of [1,10] for item " + item);
  if (ext_popularity < 0)
    throw ValidationError("negative ext_popularity for item " + item);
}

void DyadSession::validate() const {
  if (user_a.empty() || user_b.empty() || user_a == user_b)
    throw ValidationError("session requires two distinct participants");
  if (shown_items.size() < 10 || shown_items.size() > 20)
    throw ValidationError("session for (" + user_a + ", " + user_b + ") shows " +
                          std::to_string(shown_items.size()) + " items, expected 10..20");
  std::vector<ItemId> sorted = shown_items;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("duplicate shown item in session (" + user_a + ", " + user_b + ")");
  for (const auto& item : shown_items) {
    if (!sorted_contains(own_recs_a, item) && !sorted_contains(own_recs_b, item))
      throw ValidationError("shown item " + item + " has no recommendation provenance");
  }
}

const char* to_string(StudyGroup g) {
  switch (g) {
    case StudyGroup::BothShown: return "both_shown";
    case StudyGroup::OwnShown: return "own_shown";
    case StudyGroup::OtherShown: return "other_shown";
  }
  return "?";
}

LikesMatrix to_unary(const RatingsTable& ratings, Rating threshold) {
  LikesMatrix out;
  for (const auto& [key, rating] : ratings.entries())
    if (rating >= threshold) out.add(key.first, key.second);
  return out;
}

LikesMatrix to_unary(const RatingsTable& ratings) {
  return to_unary(ratings, Rating::from_half_units(8));
}

LikesMatrix merge_likes(const LikesMatrix& a, const LikesMatrix& b) {
  LikesMatrix out;
  for (const auto& [user, items] : a.by_user())
    for (const auto& item : items) out.add(user, item);
  for (const auto& [user, items] : b.by_user())
    for (const auto& item : items) out.add(user, item);
  return out;
}

StudyGroup assign_group(const UserId& participant, const DyadSession& session) {
  if (participant != session.user_a && participant != session.user_b)
    throw ContractError("participant " + participant + " is not in the session");
  session.validate();
  if (session.shown_items.size() > 10) return StudyGroup::BothShown;

  const auto& own = (participant == session.user_a) ? session.own_recs_a : session.own_recs_b;
  const auto& other = (participant == session.user_a) ? session.own_recs_b : session.own_recs_a;
  auto subset_of = [](const std::vector<ItemId>& items, const std::vector<ItemId>& set) {
    return std::all_of(items.begin(), items.end(),
                       [&](const ItemId& i) { return sorted_contains(set, i); });
  };
  if (subset_of(session.shown_items, own)) return StudyGroup::OwnShown;
  if (subset_of(session.shown_items, other)) return StudyGroup::OtherShown;
  throw ValidationError("10-item session for (" + session.user_a + ", " + session.user_b +
                        ") mixes recommendation provenance");
}

}  // namespace prefshare
