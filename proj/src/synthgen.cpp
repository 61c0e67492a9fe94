#include "prefshare/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "prefshare/csv.hpp"
#include "prefshare/recommender.hpp"
#include "prefshare/rng.hpp"

namespace prefshare::synth {

namespace {

std::string padded(const char* prefix, int i, int width) {
  std::string num = std::to_string(i);
  std::string out = prefix;
  out.append(width > static_cast<int>(num.size()) ? width - num.size() : 0, '0');
  return out + num;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> draw_trait(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> t(dim);
  for (auto& v : t) v = gauss(rng);
  return t;
}

// Geometric on {0,1,...} by inversion; mean (1-q)/q.
int geometric_icdf(double u, double q) {
  if (u <= 0.0) return 0;
  return static_cast<int>(std::floor(std::log1p(-u) / std::log1p(-q)));
}

// Weighted sample of `count` distinct indexes (Efraimidis-Spirakis keys).
std::vector<int> weighted_sample(const std::vector<double>& weights, int count,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, int>> keys;
  keys.reserve(weights.size());
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    double w = std::max(weights[i], 1e-12);
    keys.emplace_back(-std::log(unif(rng)) / w, i);
  }
  count = std::min<int>(count, static_cast<int>(keys.size()));
  std::partial_sort(keys.begin(), keys.begin() + count, keys.end());
  std::vector<int> out(count);
  for (int i = 0; i < count; ++i) out[i] = keys[i].second;
  std::sort(out.begin(), out.end());
  return out;
}

struct Affinity {
  const GroundTruth* gt;
  double scale;
  double operator()(const UserId& u, const ItemId& i) const {
    const auto& xu = gt->user_traits.at(u);
    const auto& yi = gt->item_traits.at(i);
    return logistic(scale * dot(xu, yi) / std::sqrt(static_cast<double>(xu.size())));
  }
};

}  // namespace

void StudyProfile::validate() const {
  if (n_pairs < 1 || n_items < 1 || n_background_users < 1 || friends_per_participant < 1 ||
      latent_dim < 1)
    throw ValidationError("study profile counts must be positive");
  if (sender_dominance < 1.0)
    throw ValidationError("sender_dominance must be >= 1");
  if (likes_per_person_mean <= 0 || ratings_per_person <= 0 || shares_per_person <= 0)
    throw ValidationError("per-person targets must be positive");
  if (shares_per_person > 10.0)
    throw ValidationError("infeasible profile: shares/person exceeds the minimum shown-set size");
  if (failed_profile_rate < 0.0 || failed_profile_rate > 1.0)
    throw ValidationError("failed_profile_rate must lie in [0,1]");
}

SyntheticStudy generate_study(const StudyProfile& profile, std::uint64_t seed) {
  profile.validate();
  SyntheticStudy study;
  GroundTruth& gt = study.ground_truth;
  gt.latent_dim = profile.latent_dim;

  const int id_width = 4;
  std::vector<ItemId> items(profile.n_items);
  for (int i = 0; i < profile.n_items; ++i) items[i] = padded("m", i, id_width);
  std::vector<UserId> background(profile.n_background_users);
  for (int i = 0; i < profile.n_background_users; ++i) background[i] = padded("f", i, id_width);
  std::vector<UserId> participants;
  for (int k = 0; k < profile.n_pairs; ++k) {
    participants.push_back(padded("p", k, id_width) + "a");
    participants.push_back(padded("p", k, id_width) + "b");
  }

  {
    auto rng = make_engine(derive_seed(seed, "traits"));
    for (const auto& item : items) gt.item_traits[item] = draw_trait(rng, profile.latent_dim);
    for (const auto& u : background) gt.user_traits[u] = draw_trait(rng, profile.latent_dim);
    for (const auto& u : participants) gt.user_traits[u] = draw_trait(rng, profile.latent_dim);
  }
  const Affinity affinity{&gt, profile.affinity_scale};

  {
    auto rng = make_engine(derive_seed(seed, "item-meta"));
    std::normal_distribution<double> rating_dist(7.5, 1.2);
    std::lognormal_distribution<double> pop_dist(16.0, 0.7);
    for (const auto& item : items) {
      ItemMeta meta;
      meta.item = item;
      meta.ext_rating = std::clamp(std::round(rating_dist(rng) * 10.0) / 10.0, 1.0, 10.0);
      meta.ext_popularity = static_cast<std::int64_t>(pop_dist(rng));
      study.items.emplace(item, meta);
    }
  }

  // Which pairs lost one member's like profile (the study analog is an API
  // fetch failure); those pairs become the Own-/Other-Shown sessions.
  std::vector<int> failed_member(profile.n_pairs, -1);
  {
    auto rng = make_engine(derive_seed(seed, "failures"));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < profile.n_pairs; ++k)
      if (unif(rng) < profile.failed_profile_rate) failed_member[k] = unif(rng) < 0.5 ? 0 : 1;
  }

  // Profile likes, trait-weighted; like counts follow a lognormal matched to
  // the mean/sd targets.
  const double ln_var = std::log1p(profile.likes_per_person_sd * profile.likes_per_person_sd /
                                   (profile.likes_per_person_mean * profile.likes_per_person_mean));
  const double ln_mu = std::log(profile.likes_per_person_mean) - ln_var / 2.0;
  auto draw_likes = [&](const UserId& u, std::mt19937_64& rng, int min_count) {
    std::lognormal_distribution<double> count_dist(ln_mu, std::sqrt(ln_var));
    int count = std::clamp(static_cast<int>(std::round(count_dist(rng))), min_count,
                           profile.n_items);
    std::vector<double> weights(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
      weights[i] = std::pow(affinity(u, items[i]), profile.like_sharpness);
    for (int i : weighted_sample(weights, count, rng)) study.profile_likes.add(u, items[i]);
  };
  {
    auto rng = make_engine(derive_seed(seed, "likes"));
    for (const auto& u : background) draw_likes(u, rng, 0);
    for (int k = 0; k < profile.n_pairs; ++k) {
      for (int m = 0; m < 2; ++m) {
        if (failed_member[k] == m) continue;  // unavailable profile
        draw_likes(participants[2 * k + m], rng, 3);
      }
    }
  }

  // Sessions: friends are drawn per attempt until the pair yields a valid
  // shown set (10 from one member when a profile failed, 11..20 otherwise).
  {
    for (int k = 0; k < profile.n_pairs; ++k) {
      const UserId& ua = participants[2 * k];
      const UserId& ub = participants[2 * k + 1];
      bool done = false;
      for (int attempt = 0; attempt < 32 && !done; ++attempt) {
        auto rng = make_engine(derive_seed(seed, "session", (static_cast<std::uint64_t>(k) << 8) |
                                                                static_cast<std::uint64_t>(attempt)));
        std::set<UserId> friends_a, friends_b;
        std::uniform_int_distribution<int> pick(0, profile.n_background_users - 1);
        while (static_cast<int>(friends_a.size()) < profile.friends_per_participant)
          friends_a.insert(background[pick(rng)]);
        while (static_cast<int>(friends_b.size()) < profile.friends_per_participant)
          friends_b.insert(background[pick(rng)]);

        auto recs_a = failed_member[k] == 0
                          ? RecommendationList{ua, {}}
                          : recommend(ua, friends_a, study.profile_likes, 20, 10);
        auto recs_b = failed_member[k] == 1
                          ? RecommendationList{ub, {}}
                          : recommend(ub, friends_b, study.profile_likes, 20, 10);

        DyadSession session;
        session.user_a = ua;
        session.user_b = ub;
        for (const auto& [item, score] : recs_a.entries) session.own_recs_a.push_back(item);
        for (const auto& [item, score] : recs_b.entries) session.own_recs_b.push_back(item);
        std::sort(session.own_recs_a.begin(), session.own_recs_a.end());
        std::sort(session.own_recs_b.begin(), session.own_recs_b.end());
        std::set<ItemId> shown_set(session.own_recs_a.begin(), session.own_recs_a.end());
        shown_set.insert(session.own_recs_b.begin(), session.own_recs_b.end());

        const bool one_sided = failed_member[k] >= 0;
        if (shown_set.size() < 10 || (!one_sided && shown_set.size() <= 10)) continue;

        session.shown_items.assign(shown_set.begin(), shown_set.end());
        std::shuffle(session.shown_items.begin(), session.shown_items.end(), rng);
        session.validate();
        study.sessions.push_back(std::move(session));

        for (const auto& f : friends_a) study.graph.add_edge(ua, f);
        for (const auto& f : friends_b) study.graph.add_edge(ub, f);
        study.graph.add_edge(ua, ub);
        study.graph.add_edge(ub, ua);
        done = true;
      }
      if (!done)
        throw ValidationError("calibration error: could not build a valid session for pair " +
                              std::to_string(k));
    }
  }

  // Ratings: each member rates shown items independently; the intercept is
  // calibrated in a second pass so the realized mean hits the target before
  // discretization to the half-step grid.
  {
    auto rng = make_engine(derive_seed(seed, "ratings"));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, profile.rating_noise_sd);
    struct Planned {
      UserId user;
      ItemId item;
      double raw;
    };
    std::vector<Planned> planned;
    for (const auto& session : study.sessions) {
      const double p_rate = profile.ratings_per_person / session.shown_items.size();
      for (const UserId* u : {&session.user_a, &session.user_b}) {
        for (const auto& item : session.shown_items) {
          if (unif(rng) >= p_rate) continue;
          planned.push_back({*u, item, profile.rating_gain * affinity(*u, item) + noise(rng)});
        }
      }
    }
    double mean_raw = 0.0;
    for (const auto& p : planned) mean_raw += p.raw;
    if (!planned.empty()) mean_raw /= planned.size();
    const double base = profile.mean_rating - mean_raw;
    for (const auto& p : planned) {
      int hu = std::clamp(static_cast<int>(std::round((base + p.raw) * 2.0)), 1, 10);
      study.ratings.add(p.user, p.item, Rating::from_half_units(hu));
    }
  }

  // Shares: preference-ordered prefix per sender. Promiscuity quantiles are
  // stratified across senders so the per-person mean is stable seed to seed.
  {
    auto rng = make_engine(derive_seed(seed, "shares"));
    const int n_senders = 2 * profile.n_pairs;
    std::vector<double> quantiles(n_senders);
    for (int i = 0; i < n_senders; ++i) quantiles[i] = (i + 0.5) / n_senders;
    std::shuffle(quantiles.begin(), quantiles.end(), rng);
    const double q = 1.0 / (1.0 + profile.shares_per_person);

    int sender_no = 0;
    for (const auto& session : study.sessions) {
      for (const UserId* up : {&session.user_a, &session.user_b}) {
        const UserId& sender = *up;
        const UserId& recipient = (sender == session.user_a) ? session.user_b : session.user_a;
        int prom = std::min<int>(geometric_icdf(quantiles[sender_no++], q),
                                 static_cast<int>(session.shown_items.size()));

        std::vector<std::pair<double, ItemId>> ranked;
        for (const auto& item : session.shown_items) {
          double score = profile.sender_dominance * affinity(sender, item) +
                         affinity(recipient, item);
          ranked.emplace_back(score, item);
          gt.share_propensities.emplace_back(sender, recipient, item, score);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first > b.first;
          return a.second < b.second;
        });
        for (int r = 0; r < static_cast<int>(ranked.size()); ++r)
          study.shares.push_back({sender, recipient, ranked[r].second, r < prom});
      }
    }
  }

  return study;
}

std::vector<stats::RatingRow> planted_effect_ratings(int n_participants, int n_items,
                                                     double beta_condition, double sigma_p,
                                                     double sigma_m, double sigma_e,
                                                     std::uint64_t seed, double beta_intercept) {
  if (n_participants < 1 || n_items < 1)
    throw ContractError("planted_effect_ratings requires positive counts");
  if (sigma_p < 0 || sigma_m < 0 || sigma_e < 0)
    throw ContractError("planted_effect_ratings requires non-negative sigmas");
  auto rng = make_engine(derive_seed(seed, "planted"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> u(n_participants), v(n_items);
  for (auto& x : u) x = sigma_p * gauss(rng);
  for (auto& x : v) x = sigma_m * gauss(rng);

  std::vector<stats::RatingRow> rows;
  rows.reserve(static_cast<std::size_t>(n_participants) * n_items);
  for (int p = 0; p < n_participants; ++p) {
    for (int m = 0; m < n_items; ++m) {
      stats::RatingRow row;
      row.participant = padded("p", p, 4);
      row.item = padded("m", m, 4);
      row.condition = unif(rng) < 0.5 ? 1 : 0;
      row.rating = beta_intercept + beta_condition * row.condition + u[p] + v[m] +
                   sigma_e * gauss(rng);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void save_study(const std::filesystem::path& dir, const SyntheticStudy& study) {
  std::filesystem::create_directories(dir);
  csv::save_likes(dir / "likes.csv", study.profile_likes);
  csv::save_ratings(dir / "ratings.csv", study.ratings);
  csv::save_shares(dir / "shares.csv", study.shares);
  csv::save_items(dir / "items.csv", study.items);
  csv::save_sessions(dir / "sessions.csv", study.sessions);
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& node : study.graph.nodes())
      for (const auto& dst : study.graph.out_neighbors(node)) rows.push_back({node, dst});
    csv::write_table_atomic(dir / "graph.csv", {"src", "dst"}, rows);
  }
  std::filesystem::create_directories(dir / "groundtruth");
  save_ground_truth(dir / "groundtruth" / "groundtruth.csv", study.ground_truth);
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"latent_dim", std::to_string(gt.latent_dim), "", "", ""});
  for (const auto& [user, trait] : gt.user_traits)
    for (std::size_t d = 0; d < trait.size(); ++d)
      rows.push_back({"user_trait", user, std::to_string(d), "", csv::format_double(trait[d])});
  for (const auto& [item, trait] : gt.item_traits)
    for (std::size_t d = 0; d < trait.size(); ++d)
      rows.push_back({"item_trait", item, std::to_string(d), "", csv::format_double(trait[d])});
  for (const auto& [sender, recipient, item, score] : gt.share_propensities)
    rows.push_back({"share_propensity", sender, recipient, item, csv::format_double(score)});
  csv::write_table_atomic(path, {"kind", "a", "b", "c", "value"}, rows);
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto table = csv::read_table(path, {"kind", "a", "b", "c", "value"});
  GroundTruth gt;
  for (const auto& row : table.rows) {
    if (row[0] == "latent_dim") {
      gt.latent_dim = std::stoi(row[1]);
    } else if (row[0] == "user_trait" || row[0] == "item_trait") {
      auto& traits = row[0][0] == 'u' ? gt.user_traits : gt.item_traits;
      auto& vec = traits[row[1]];
      std::size_t d = std::stoul(row[2]);
      if (vec.size() <= d) vec.resize(d + 1);
      vec[d] = std::strtod(row[4].c_str(), nullptr);
    } else if (row[0] == "share_propensity") {
      gt.share_propensities.emplace_back(row[1], row[2], row[3],
                                         std::strtod(row[4].c_str(), nullptr));
    } else {
      throw ValidationError(path.string() + ": unknown ground truth kind '" + row[0] + "'");
    }
  }
  return gt;
}

}  // namespace prefshare::synth
