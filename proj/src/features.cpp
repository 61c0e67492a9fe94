#include "prefshare/features.hpp"

#include <algorithm>

#include "prefshare/rng.hpp"

namespace prefshare {

int promiscuity(const UserId& sender, const std::vector<ShareRecord>& training_shares) {
  int n = 0;
  for (const auto& r : training_shares)
    if (r.shared && r.sender == sender) ++n;
  return n;
}

FeatureVector featurize(const UserId& sender, const UserId& recipient, const ItemId& item,
                        const FeatureContext& ctx, const std::vector<ShareRecord>& training_shares) {
  auto meta_it = ctx.meta.find(item);
  if (meta_it == ctx.meta.end())
    throw ContractError("featurize called for item without meta: " + item);
  FeatureVector fv;
  fv.sender_item_sim =
      user_item_preference(sender, item, ctx.likes, ctx.cache, ctx.exclude_self_similarity);
  fv.recipient_item_sim =
      user_item_preference(recipient, item, ctx.likes, ctx.cache, ctx.exclude_self_similarity);
  fv.sender_recipient_sim = jaccard_users(sender, recipient, ctx.likes);
  fv.sender_promiscuity = promiscuity(sender, training_shares);
  fv.item_ext_rating = meta_it->second.ext_rating;
  fv.item_ext_popularity = static_cast<double>(meta_it->second.ext_popularity);
  return fv;
}

std::vector<BalancedDataset> build_balanced_datasets(const std::vector<ShareRecord>& shares,
                                                     const FeatureContext& ctx, int m,
                                                     std::uint64_t seed,
                                                     int* skipped_missing_meta) {
  if (m < 1) throw ContractError("build_balanced_datasets requires m >= 1");

  std::vector<ShareRecord> usable;
  int skipped = 0;
  for (const auto& r : shares) {
    if (ctx.meta.count(r.item)) {
      usable.push_back(r);
    } else {
      ++skipped;
    }
  }
  if (skipped_missing_meta) *skipped_missing_meta = skipped;

  std::vector<std::size_t> positives, pool;
  for (std::size_t i = 0; i < usable.size(); ++i)
    (usable[i].shared ? positives : pool).push_back(i);
  if (pool.size() < positives.size())
    throw ValidationError("non-share pool (" + std::to_string(pool.size()) +
                          ") smaller than positive count (" + std::to_string(positives.size()) + ")");

  // Static features are identical across datasets; compute once per record.
  std::vector<FeatureVector> feats(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i)
    feats[i] = featurize(usable[i].sender, usable[i].recipient, usable[i].item, ctx, usable);

  std::vector<BalancedDataset> datasets;
  datasets.reserve(m);
  for (int d = 0; d < m; ++d) {
    BalancedDataset ds;
    ds.seed = derive_seed(seed, "balanced-dataset", static_cast<std::uint64_t>(d));
    auto rng = make_engine(ds.seed);
    // Partial Fisher-Yates: the first |positives| entries are the sample.
    std::vector<std::size_t> negs = pool;
    for (std::size_t i = 0; i < positives.size(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, negs.size() - 1);
      std::swap(negs[i], negs[pick(rng)]);
    }
    negs.resize(positives.size());

    for (std::size_t i : positives)
      ds.instances.push_back({usable[i], feats[i], true});
    for (std::size_t i : negs)
      ds.instances.push_back({usable[i], feats[i], false});
    datasets.push_back(std::move(ds));
  }
  return datasets;
}

}  // namespace prefshare
