#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace prefshare {

// Input or data-consistency problem; the CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an API precondition.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using UserId = std::string;
using ItemId = std::string;

// Ratings live on the half-step grid 0.5..5.0 and are stored as integer
// half-units (1..10) so the like-threshold boundary is exact.
class Rating {
 public:
  static Rating from_half_units(int hu);
  static Rating parse(const std::string& text);  // decimal, validated to grid

  int half_units() const { return half_units_; }
  double value() const { return half_units_ * 0.5; }
  std::string to_string() const;  // "3.5", "4.0", ...

  bool operator==(const Rating&) const = default;
  auto operator<=>(const Rating&) const = default;

 private:
  explicit Rating(int hu) : half_units_(hu) {}
  int half_units_ = 1;
};

// Sparse unary user<->item relation with both orientations indexed.
// Per-key lists are kept sorted and duplicate-free; the two indexes are
// exact transposes by construction.
class LikesMatrix {
 public:
  void add(const UserId& user, const ItemId& item);
  bool contains(const UserId& user, const ItemId& item) const;

  const std::vector<ItemId>& items_of(const UserId& user) const;
  const std::vector<UserId>& users_of(const ItemId& item) const;

  const std::map<UserId, std::vector<ItemId>>& by_user() const { return by_user_; }
  const std::map<ItemId, std::vector<UserId>>& by_item() const { return by_item_; }

  std::size_t size() const { return n_likes_; }  // number of (user,item) pairs
  bool transpose_consistent() const;             // full scan

 private:
  std::map<UserId, std::vector<ItemId>> by_user_;
  std::map<ItemId, std::vector<UserId>> by_item_;
  std::size_t n_likes_ = 0;
};

class RatingsTable {
 public:
  // Re-rating the same (user,item) is a data error.
  void add(const UserId& user, const ItemId& item, Rating rating);
  const Rating* find(const UserId& user, const ItemId& item) const;

  const std::map<std::pair<UserId, ItemId>, Rating>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<UserId, ItemId>, Rating> entries_;
};

// A directed (sender, recipient, item) event. shared=false rows are the
// shown-but-not-shared pool, materialized eagerly per session.
struct ShareRecord {
  UserId sender;
  UserId recipient;
  ItemId item;
  bool shared = false;

  bool operator==(const ShareRecord&) const = default;
};

struct ItemMeta {
  ItemId item;
  double ext_rating = 0.0;       // [1,10]
  std::int64_t ext_popularity = 0;

  void validate() const;
};

// One pair's session: the items both partners saw, with provenance.
struct DyadSession {
  UserId user_a;
  UserId user_b;
  std::vector<ItemId> shown_items;   // presentation order, deduplicated
  std::vector<ItemId> own_recs_a;    // sorted; items recommended from a's profile
  std::vector<ItemId> own_recs_b;    // sorted; items recommended from b's profile

  void validate() const;  // 10 <= |shown| <= 20, provenance covers shown, a != b
};

enum class StudyGroup { BothShown, OwnShown, OtherShown };

const char* to_string(StudyGroup g);

// (u,i) present iff rating(u,i) >= threshold. Boundary is exact: the grid
// is integral in half-units.
LikesMatrix to_unary(const RatingsTable& ratings, Rating threshold);
LikesMatrix to_unary(const RatingsTable& ratings);  // default threshold 4.0

// Set union per user; transpose consistency preserved.
LikesMatrix merge_likes(const LikesMatrix& a, const LikesMatrix& b);

// >10 shown items -> BothShown; a 10-item session is OwnShown when every
// shown item came from the participant's own recommendations, OtherShown
// when every item came from the partner's. A 10-item session matching
// neither provenance set is inconsistent.
StudyGroup assign_group(const UserId& participant, const DyadSession& session);

}  // namespace prefshare
