#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prefshare/core.hpp"
#include "prefshare/similarity.hpp"

namespace prefshare {

// Feature vector layout shared with the classifier and the tree text format.
inline constexpr int kNumFeatures = 6;
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "sharer_sim", "recip_sim", "sharer_recip_sim", "sharer_prom", "ext_rating", "ext_pop"};

struct FeatureVector {
  double sender_item_sim = 0.0;       // sharer_sim
  double recipient_item_sim = 0.0;    // recip_sim
  double sender_recipient_sim = 0.0;  // sharer_recip_sim
  double sender_promiscuity = 0.0;    // sharer_prom (count)
  double item_ext_rating = 0.0;       // ext_rating, [1,10]
  double item_ext_popularity = 0.0;   // ext_pop (count)

  std::array<double, kNumFeatures> as_array() const {
    return {sender_item_sim, recipient_item_sim, sender_recipient_sim,
            sender_promiscuity, item_ext_rating, item_ext_popularity};
  }
  bool operator==(const FeatureVector&) const = default;
};

struct TrainingInstance {
  ShareRecord record;
  FeatureVector features;
  bool label = false;
};

// Equal counts of positive and negative labels by construction.
struct BalancedDataset {
  std::vector<TrainingInstance> instances;
  std::uint64_t seed = 0;
};

// Everything featurize needs besides the (sender, recipient, item) triple.
struct FeatureContext {
  const LikesMatrix& likes;
  const std::map<ItemId, ItemMeta>& meta;
  const ItemSimilarityCache* cache = nullptr;
  bool exclude_self_similarity = false;
};

// Number of shared=true records by this sender within the supplied split.
// Never counts anything outside it, which is what keeps cross-validation
// free of label leakage.
int promiscuity(const UserId& sender, const std::vector<ShareRecord>& training_shares);

// Pure function of its inputs; repeated calls are byte-identical.
// Requires meta for the item (the caller filters records without meta).
FeatureVector featurize(const UserId& sender, const UserId& recipient, const ItemId& item,
                        const FeatureContext& ctx, const std::vector<ShareRecord>& training_shares);

// m datasets, each keeping every positive and sampling an equal number of
// negatives uniformly without replacement from the shown-but-not-shared pool.
// Records whose item lacks meta are skipped (counted in skipped_missing_meta),
// mirroring the upstream filtering of the share pool. Promiscuity is filled
// from the full positive set here; cross_validate recomputes it per fold.
std::vector<BalancedDataset> build_balanced_datasets(const std::vector<ShareRecord>& shares,
                                                     const FeatureContext& ctx, int m,
                                                     std::uint64_t seed,
                                                     int* skipped_missing_meta = nullptr);

}  // namespace prefshare
