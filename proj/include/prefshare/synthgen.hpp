#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <tuple>
#include <vector>

#include "prefshare/core.hpp"
#include "prefshare/diffusion.hpp"
#include "prefshare/stats.hpp"

namespace prefshare::synth {

// Aggregate targets for the generated population plus the knobs of the
// latent-trait generative process. Calibration is expectation-level: the
// aggregate targets are hit in expectation, not exactly per draw.
struct StudyProfile {
  int n_pairs = 87;
  double likes_per_person_mean = 18.2;
  double likes_per_person_sd = 31.8;
  double ratings_per_person = 8.18;
  double mean_rating = 3.85;
  double shares_per_person = 2.7;
  int latent_dim = 8;
  double sender_dominance = 3.0;  // rho = sender weight / recipient weight in share choice

  // Population scaffolding.
  int n_items = 400;
  int n_background_users = 500;
  int friends_per_participant = 60;
  double failed_profile_rate = 1.0 / 3.0;  // pairs where one member's likes are unavailable

  // Affinity and rating shape.
  double affinity_scale = 2.0;      // logistic steepness on the trait dot product
  double like_sharpness = 3.0;      // like sampling weight = affinity^sharpness
  double rating_gain = 2.2;         // rating points per unit affinity
  double rating_noise_sd = 0.55;

  void validate() const;
};

struct GroundTruth {
  int latent_dim = 0;
  std::map<UserId, std::vector<double>> user_traits;
  std::map<ItemId, std::vector<double>> item_traits;
  // (sender, recipient, item) -> the score that ordered the share choice.
  std::vector<std::tuple<UserId, UserId, ItemId, double>> share_propensities;

  bool operator==(const GroundTruth&) const = default;
};

struct SyntheticStudy {
  LikesMatrix profile_likes;  // collected profiles; study ratings are separate
  RatingsTable ratings;
  std::vector<ShareRecord> shares;  // shared and shown-but-not-shared rows
  std::vector<DyadSession> sessions;
  std::map<ItemId, ItemMeta> items;
  diffusion::SocialGraph graph;  // participant -> friend and partner edges
  GroundTruth ground_truth;
};

// Deterministic for a given (profile, seed). Latent traits drive likes,
// recommendations (via the ego-network recommender), ratings, and the
// preference-ordered share prefixes.
SyntheticStudy generate_study(const StudyProfile& profile, std::uint64_t seed);

// rating = b0 + beta*condition + u_participant + v_item + eps over the full
// participant x item grid, condition assigned 50/50 at random per row.
std::vector<stats::RatingRow> planted_effect_ratings(int n_participants, int n_items,
                                                     double beta_condition, double sigma_p,
                                                     double sigma_m, double sigma_e,
                                                     std::uint64_t seed,
                                                     double beta_intercept = 3.85);

// Writes the study CSVs into dir and the hidden ground truth into
// dir/groundtruth/, which pipeline commands never read.
void save_study(const std::filesystem::path& dir, const SyntheticStudy& study);

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);
GroundTruth load_ground_truth(const std::filesystem::path& path);

}  // namespace prefshare::synth
