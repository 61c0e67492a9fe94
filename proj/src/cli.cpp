#include "prefshare/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "prefshare/classifier.hpp"
#include "prefshare/csv.hpp"
#include "prefshare/diffusion.hpp"
#include "prefshare/features.hpp"
#include "prefshare/recommender.hpp"
#include "prefshare/rng.hpp"
#include "prefshare/stats.hpp"
#include "prefshare/synthgen.hpp"

namespace prefshare::cli {

namespace {

namespace fs = std::filesystem;

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_text_atomic(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

void write_resolved_config(const fs::path& out_dir, const std::string& subcommand,
                           const KeyValues& kv) {
  fs::create_directories(out_dir);
  std::string text = "subcommand=" + subcommand + "\n";
  for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
  write_text_atomic(out_dir / "resolved-config.txt", text);
}

std::string fmt(double v) { return csv::format_double(v); }

void require_file(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("missing input file: " + path.string());
}

struct StudyData {
  LikesMatrix merged_likes;
  std::vector<ShareRecord> shares;
  std::map<ItemId, ItemMeta> items;
};

// The feature pipeline combines collected like profiles with unary study
// ratings; at least one of the two sources must be present.
StudyData load_study_data(const fs::path& dir, const Rating& like_threshold) {
  StudyData data;
  const fs::path likes_path = dir / "likes.csv";
  const fs::path ratings_path = dir / "ratings.csv";
  if (!fs::exists(likes_path) && !fs::exists(ratings_path))
    throw ValidationError("missing input file: " + likes_path.string() + " (and no ratings.csv)");
  LikesMatrix profile;
  if (fs::exists(likes_path)) profile = csv::load_likes(likes_path);
  LikesMatrix from_ratings;
  if (fs::exists(ratings_path))
    from_ratings = to_unary(csv::load_ratings(ratings_path), like_threshold);
  data.merged_likes = merge_likes(profile, from_ratings);

  require_file(dir / "shares.csv");
  require_file(dir / "items.csv");
  data.shares = csv::load_shares(dir / "shares.csv");
  data.items = csv::load_items(dir / "items.csv");
  return data;
}

void write_report(const fs::path& path,
                  const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& [group, m] : rows)
    out.push_back({group, fmt(m.precision), fmt(m.recall), fmt(m.accuracy)});
  csv::write_table_atomic(path, {"group", "precision", "recall", "accuracy"}, out);
}

stats::SampleSummary parse_summary(const std::string& text) {
  std::istringstream in(text);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 3)
    throw ValidationError("summary must be n,mean,sd: '" + text + "'");
  stats::SampleSummary s;
  s.n = std::stoul(fields[0]);
  s.mean = std::stod(fields[1]);
  s.sd = std::stod(fields[2]);
  s.validate();
  return s;
}

void emit_stats(const KeyValues& kv, const std::string& out_dir, const std::string& subcommand,
                const KeyValues& config) {
  for (const auto& [k, v] : kv) std::cout << k << "=" << v << "\n";
  if (!out_dir.empty()) {
    write_resolved_config(out_dir, subcommand, config);
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : kv) rows.push_back({k, v});
    csv::write_table_atomic(fs::path(out_dir) / "stats.csv", {"key", "value"}, rows);
  }
}

struct CommonTreeOpts {
  int datasets = 10;
  int folds = 10;
  int max_depth = 5;
  int min_leaf = 5;
  double like_threshold = 4.0;
  int jobs = 1;
  std::uint64_t seed = 0;
};

void add_tree_opts(CLI::App* cmd, CommonTreeOpts& opts, bool with_folds) {
  cmd->add_option("--datasets", opts.datasets, "Number of balanced datasets");
  if (with_folds) cmd->add_option("--folds", opts.folds, "Cross-validation folds");
  cmd->add_option("--max-depth", opts.max_depth, "Decision tree depth limit");
  cmd->add_option("--min-leaf", opts.min_leaf, "Minimum samples per leaf");
  cmd->add_option("--like-threshold", opts.like_threshold, "Rating treated as a Like");
  cmd->add_option("--jobs", opts.jobs, "Worker threads (default sequential)");
  cmd->add_option("--seed", opts.seed, "Master RNG seed");
}

KeyValues tree_opts_config(const CommonTreeOpts& opts, const std::string& data_dir) {
  return {{"data", data_dir},
          {"seed", std::to_string(opts.seed)},
          {"datasets", std::to_string(opts.datasets)},
          {"folds", std::to_string(opts.folds)},
          {"max_depth", std::to_string(opts.max_depth)},
          {"min_leaf", std::to_string(opts.min_leaf)},
          {"like_threshold", fmt(opts.like_threshold)},
          {"jobs", std::to_string(opts.jobs)}};
}

std::vector<BalancedDataset> build_pipeline_datasets(const fs::path& data_dir,
                                                     const CommonTreeOpts& opts,
                                                     const ItemSimilarityCache*& cache_out,
                                                     StudyData& data,
                                                     ItemSimilarityCache& cache_storage,
                                                     int* skipped) {
  data = load_study_data(data_dir, Rating::parse(fmt(opts.like_threshold)));
  cache_storage = ItemSimilarityCache(data.merged_likes);
  cache_out = &cache_storage;
  FeatureContext ctx{data.merged_likes, data.items, cache_out, false};
  return build_balanced_datasets(data.shares, ctx, opts.datasets, opts.seed, skipped);
}

int cmd_ingest(const std::string& data_dir, const std::string& out_dir) {
  const fs::path dir(data_dir);
  std::vector<std::vector<std::string>> summary;
  std::size_t n_sessions = 0;
  std::vector<DyadSession> sessions;
  if (fs::exists(dir / "likes.csv"))
    summary.push_back({"likes", std::to_string(csv::load_likes(dir / "likes.csv").size())});
  if (fs::exists(dir / "ratings.csv"))
    summary.push_back({"ratings", std::to_string(csv::load_ratings(dir / "ratings.csv").size())});
  std::vector<ShareRecord> shares;
  if (fs::exists(dir / "shares.csv")) {
    shares = csv::load_shares(dir / "shares.csv");
    summary.push_back({"shares", std::to_string(shares.size())});
  }
  if (fs::exists(dir / "items.csv"))
    summary.push_back({"items", std::to_string(csv::load_items(dir / "items.csv").size())});
  if (fs::exists(dir / "sessions.csv")) {
    sessions = csv::load_sessions(dir / "sessions.csv");
    n_sessions = sessions.size();
    summary.push_back({"sessions", std::to_string(n_sessions)});
  }
  if (fs::exists(dir / "graph.csv")) {
    auto graph = diffusion::load_graph(dir / "graph.csv");
    summary.push_back({"graph_nodes", std::to_string(graph.nodes().size())});
  }
  if (summary.empty())
    throw ValidationError("no recognized input files under " + dir.string());

  // Shares must reference items actually shown to the sender in a session.
  if (!shares.empty() && n_sessions > 0) {
    for (const auto& share : shares) {
      bool found = false;
      for (const auto& s : sessions) {
        if ((s.user_a == share.sender && s.user_b == share.recipient) ||
            (s.user_b == share.sender && s.user_a == share.recipient)) {
          found = std::find(s.shown_items.begin(), s.shown_items.end(), share.item) !=
                  s.shown_items.end();
          if (found) break;
        }
      }
      if (!found)
        throw ValidationError("share of " + share.item + " by " + share.sender +
                              " has no matching session row");
    }
  }

  write_resolved_config(out_dir, "ingest", {{"data", data_dir}});
  csv::write_table_atomic(fs::path(out_dir) / "summary.csv", {"entity", "count"}, summary);
  return 0;
}

int cmd_recommend(const std::string& data_dir, const std::string& out_dir, const UserId& user,
                  int k, int n) {
  const fs::path dir(data_dir);
  require_file(dir / "likes.csv");
  require_file(dir / "graph.csv");
  auto likes = csv::load_likes(dir / "likes.csv");
  auto graph = diffusion::load_graph(dir / "graph.csv");
  std::set<UserId> friends(graph.out_neighbors(user).begin(), graph.out_neighbors(user).end());
  auto recs = recommend(user, friends, likes, k, n);

  write_resolved_config(out_dir, "recommend",
                        {{"data", data_dir},
                         {"user", user},
                         {"k", std::to_string(k)},
                         {"n", std::to_string(n)}});
  std::vector<std::vector<std::string>> rows;
  for (const auto& [item, score] : recs.entries) rows.push_back({item, fmt(score)});
  csv::write_table_atomic(fs::path(out_dir) / "recommendations.csv", {"item_id", "score"}, rows);
  return 0;
}

int cmd_featurize(const std::string& data_dir, const std::string& out_dir,
                  double like_threshold) {
  auto data = load_study_data(data_dir, Rating::parse(fmt(like_threshold)));
  ItemSimilarityCache cache(data.merged_likes);
  FeatureContext ctx{data.merged_likes, data.items, &cache, false};

  std::vector<std::vector<std::string>> rows;
  int skipped = 0;
  for (const auto& r : data.shares) {
    if (!data.items.count(r.item)) {
      ++skipped;
      continue;
    }
    auto fv = featurize(r.sender, r.recipient, r.item, ctx, data.shares);
    rows.push_back({r.sender, r.recipient, r.item, fmt(fv.sender_item_sim),
                    fmt(fv.recipient_item_sim), fmt(fv.sender_recipient_sim),
                    fmt(fv.sender_promiscuity), fmt(fv.item_ext_rating),
                    fmt(fv.item_ext_popularity), r.shared ? "1" : "0"});
  }
  if (skipped > 0)
    std::cerr << "featurize: skipped " << skipped << " records without item metadata\n";

  write_resolved_config(out_dir, "featurize",
                        {{"data", data_dir}, {"like_threshold", fmt(like_threshold)}});
  csv::write_table_atomic(fs::path(out_dir) / "features.csv",
                          {"sender", "recipient", "item", "sender_item_sim",
                           "recipient_item_sim", "sender_recipient_sim", "sender_promiscuity",
                           "ext_rating", "ext_popularity", "label"},
                          rows);
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& out_dir,
              const CommonTreeOpts& opts) {
  StudyData data;
  ItemSimilarityCache cache_storage;
  const ItemSimilarityCache* cache = nullptr;
  int skipped = 0;
  auto datasets = build_pipeline_datasets(data_dir, opts, cache, data, cache_storage, &skipped);

  TreeParams params;
  params.max_depth = opts.max_depth;
  params.min_leaf = opts.min_leaf;
  auto tree = train_tree(datasets.at(0), params);

  auto config = tree_opts_config(opts, data_dir);
  config.push_back({"skipped_missing_meta", std::to_string(skipped)});
  write_resolved_config(out_dir, "train", config);
  write_text_atomic(fs::path(out_dir) / "tree.txt", tree_to_text(tree));
  return 0;
}

int cmd_evaluate(const std::string& data_dir, const std::string& out_dir,
                 const CommonTreeOpts& opts) {
  StudyData data;
  ItemSimilarityCache cache_storage;
  const ItemSimilarityCache* cache = nullptr;
  auto datasets = build_pipeline_datasets(data_dir, opts, cache, data, cache_storage, nullptr);

  TreeParams params;
  params.max_depth = opts.max_depth;
  params.min_leaf = opts.min_leaf;
  auto report = cross_validate(datasets, params, opts.folds, opts.seed, opts.jobs);

  write_resolved_config(out_dir, "evaluate", tree_opts_config(opts, data_dir));
  write_report(fs::path(out_dir) / "report.csv", {{"all", report.grand_mean}});
  return 0;
}

int cmd_ablate(const std::string& data_dir, const std::string& out_dir,
               const CommonTreeOpts& opts) {
  StudyData data;
  ItemSimilarityCache cache_storage;
  const ItemSimilarityCache* cache = nullptr;
  auto datasets = build_pipeline_datasets(data_dir, opts, cache, data, cache_storage, nullptr);

  TreeParams params;
  params.max_depth = opts.max_depth;
  params.min_leaf = opts.min_leaf;
  const std::vector<FeatureGroup> groups = {FeatureGroup::Item, FeatureGroup::Recipient,
                                            FeatureGroup::Sender, FeatureGroup::SenderRecipient};
  auto table = ablation(groups, datasets, params, opts.folds, opts.seed, opts.jobs);

  write_resolved_config(out_dir, "ablate", tree_opts_config(opts, data_dir));
  std::vector<std::pair<std::string, Metrics>> rows;
  for (const auto& [group, report] : table) rows.emplace_back(to_string(group), report.grand_mean);
  write_report(fs::path(out_dir) / "ablation.csv", rows);
  return 0;
}

int cmd_simulate(const std::string& data_dir, const std::string& out_dir,
                 const std::string& config_path, std::uint64_t seed, int steps_override) {
  const fs::path dir(data_dir);
  require_file(dir / "graph.csv");
  require_file(dir / "seeds.csv");
  require_file(dir / "likes.csv");
  auto graph = diffusion::load_graph(dir / "graph.csv");
  auto seeds = diffusion::load_seeds(dir / "seeds.csv");
  auto likes = csv::load_likes(dir / "likes.csv");
  diffusion::CascadeConfig config;
  if (!config_path.empty()) config = diffusion::load_config(config_path);
  if (steps_override > 0) config.max_steps = steps_override;

  auto result = diffusion::run(graph, seeds, likes, config, seed);

  write_resolved_config(out_dir, "simulate",
                        {{"data", data_dir},
                         {"config", config_path},
                         {"seed", std::to_string(seed)},
                         {"theta_pref", fmt(config.theta_pref)},
                         {"salience_window", std::to_string(config.salience_window)},
                         {"weight_sender", fmt(config.weight_sender)},
                         {"weight_recipient", fmt(config.weight_recipient)},
                         {"bias", fmt(config.bias)},
                         {"quota", fmt(config.quota)},
                         {"quota_mode",
                          config.quota_mode == diffusion::QuotaMode::PerStep ? "per_step" : "lifetime"},
                         {"max_steps", std::to_string(config.max_steps)}});

  std::vector<std::vector<std::string>> ts_rows;
  for (const auto& [item, series] : result.adoption_series)
    for (std::size_t t = 0; t < series.size(); ++t)
      ts_rows.push_back({std::to_string(t), item, std::to_string(series[t])});
  csv::write_table_atomic(fs::path(out_dir) / "timeseries.csv", {"step", "item_id", "adopters"},
                          ts_rows);

  std::vector<std::vector<std::string>> sum_rows;
  for (const auto& [item, adopters] : result.final_adopters)
    sum_rows.push_back({item, std::to_string(adopters.size()),
                        std::to_string(result.shares_attempted.at(item)),
                        std::to_string(result.shares_accepted.at(item))});
  csv::write_table_atomic(fs::path(out_dir) / "summary.csv",
                          {"item_id", "final_adopters", "shares_attempted", "shares_accepted"},
                          sum_rows);
  return 0;
}

int cmd_synth(const std::string& out_dir, const synth::StudyProfile& profile,
              std::uint64_t seed) {
  auto study = synth::generate_study(profile, seed);
  write_resolved_config(out_dir, "synth",
                        {{"seed", std::to_string(seed)},
                         {"pairs", std::to_string(profile.n_pairs)},
                         {"items", std::to_string(profile.n_items)},
                         {"background", std::to_string(profile.n_background_users)},
                         {"friends", std::to_string(profile.friends_per_participant)},
                         {"dim", std::to_string(profile.latent_dim)},
                         {"rho", fmt(profile.sender_dominance)},
                         {"likes_mean", fmt(profile.likes_per_person_mean)},
                         {"likes_sd", fmt(profile.likes_per_person_sd)},
                         {"ratings_per_person", fmt(profile.ratings_per_person)},
                         {"mean_rating", fmt(profile.mean_rating)},
                         {"shares_per_person", fmt(profile.shares_per_person)},
                         {"affinity_scale", fmt(profile.affinity_scale)},
                         {"like_sharpness", fmt(profile.like_sharpness)},
                         {"failed_profile_rate", fmt(profile.failed_profile_rate)}});
  synth::save_study(out_dir, study);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Preference-driven sharing toolkit: recommendation, share "
               "prediction, cascade simulation, and the associated statistics"};
  app.require_subcommand(1);

  std::string data_dir, out_dir, user, config_path;
  CommonTreeOpts opts;
  std::uint64_t seed = 0;
  int k = 20, n = 10, steps = 0;
  double like_threshold = 4.0;
  synth::StudyProfile profile;

  auto* ingest = app.add_subcommand("ingest", "Validate a data directory");
  ingest->add_option("--data", data_dir, "Input directory")->required();
  ingest->add_option("--out", out_dir, "Output directory")->required();

  auto* rec = app.add_subcommand("recommend", "Ego-network recommendations for a user");
  rec->add_option("--data", data_dir, "Directory with likes.csv and graph.csv")->required();
  rec->add_option("--out", out_dir, "Output directory")->required();
  rec->add_option("--user", user, "User id")->required();
  rec->add_option("--k", k, "Most similar friends to use");
  rec->add_option("--n", n, "Recommendations to produce");

  auto* feat = app.add_subcommand("featurize", "Emit share-prediction features");
  feat->add_option("--data", data_dir, "Study data directory")->required();
  feat->add_option("--out", out_dir, "Output directory")->required();
  feat->add_option("--like-threshold", like_threshold, "Rating treated as a Like");

  auto* train = app.add_subcommand("train", "Train a decision tree on one balanced dataset");
  train->add_option("--data", data_dir, "Study data directory")->required();
  train->add_option("--out", out_dir, "Output directory")->required();
  add_tree_opts(train, opts, false);

  auto* eval = app.add_subcommand("evaluate", "Cross-validated share prediction metrics");
  eval->add_option("--data", data_dir, "Study data directory")->required();
  eval->add_option("--out", out_dir, "Output directory")->required();
  add_tree_opts(eval, opts, true);

  auto* ablate = app.add_subcommand("ablate", "Per-feature-group prediction metrics");
  ablate->add_option("--data", data_dir, "Study data directory")->required();
  ablate->add_option("--out", out_dir, "Output directory")->required();
  add_tree_opts(ablate, opts, true);

  auto* sim = app.add_subcommand("simulate", "Preference-salience cascade simulation");
  sim->add_option("--data", data_dir, "Directory with graph.csv, seeds.csv, likes.csv")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--config", config_path, "key=value cascade config file");
  sim->add_option("--seed", seed, "Master RNG seed");
  sim->add_option("--steps", steps, "Override max_steps");

  auto* st = app.add_subcommand("stats", "Statistical tests");
  st->require_subcommand(1);
  std::vector<std::string> summaries;
  std::string stats_file, stats_out;
  auto* ttest = st->add_subcommand("ttest", "Unpaired Welch t-test from summaries");
  ttest->add_option("--summary", summaries, "Two n,mean,sd triples")->expected(2)->required();
  ttest->add_option("--out", stats_out, "Optional output directory");
  auto* paired = st->add_subcommand("paired", "Paired t-test from a diff column");
  paired->add_option("--file", stats_file, "CSV with header 'diff'")->required();
  paired->add_option("--out", stats_out, "Optional output directory");
  auto* corr = st->add_subcommand("corr", "Pearson correlation of two columns");
  corr->add_option("--file", stats_file, "CSV with header 'x,y'")->required();
  corr->add_option("--out", stats_out, "Optional output directory");
  auto* lmm = st->add_subcommand("lmm", "Mixed-effects rating model with LRT");
  lmm->add_option("--data", stats_file, "CSV: rating,participant_id,item_id,condition")->required();
  lmm->add_option("--out", stats_out, "Optional output directory");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic study");
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Master RNG seed");
  synth_cmd->add_option("--pairs", profile.n_pairs, "Participant pairs");
  synth_cmd->add_option("--items", profile.n_items, "Catalog size");
  synth_cmd->add_option("--background", profile.n_background_users, "Background users");
  synth_cmd->add_option("--friends", profile.friends_per_participant, "Friends per participant");
  synth_cmd->add_option("--dim", profile.latent_dim, "Latent trait dimension");
  synth_cmd->add_option("--rho", profile.sender_dominance, "Sender dominance ratio");
  synth_cmd->add_option("--shares-per-person", profile.shares_per_person, "Target share volume");
  synth_cmd->add_option("--ratings-per-person", profile.ratings_per_person, "Target rating volume");
  synth_cmd->add_option("--affinity-scale", profile.affinity_scale, "Preference discrimination");
  synth_cmd->add_option("--failed-rate", profile.failed_profile_rate,
                        "Fraction of pairs with one unavailable profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (*ingest) return cmd_ingest(data_dir, out_dir);
    if (*rec) return cmd_recommend(data_dir, out_dir, user, k, n);
    if (*feat) return cmd_featurize(data_dir, out_dir, like_threshold);
    if (*train) return cmd_train(data_dir, out_dir, opts);
    if (*eval) return cmd_evaluate(data_dir, out_dir, opts);
    if (*ablate) return cmd_ablate(data_dir, out_dir, opts);
    if (*sim) return cmd_simulate(data_dir, out_dir, config_path, seed, steps);
    if (*synth_cmd) return cmd_synth(out_dir, profile, seed);

    if (*ttest) {
      auto a = parse_summary(summaries[0]);
      auto b = parse_summary(summaries[1]);
      auto r = stats::welch_t_from_summary(a, b);
      emit_stats({{"t", fmt(r.t)},
                  {"df", fmt(r.df)},
                  {"p_two_sided", fmt(r.p_two_sided)},
                  {"p_one_sided", fmt(r.p_one_sided)},
                  {"cohens_d", fmt(stats::cohens_d(a, b))}},
                 stats_out, "stats-ttest",
                 {{"summary_a", summaries[0]}, {"summary_b", summaries[1]}});
      return 0;
    }
    if (*paired) {
      auto table = csv::read_table(stats_file, {"diff"});
      std::vector<double> diffs;
      for (const auto& row : table.rows) diffs.push_back(std::stod(row[0]));
      auto r = stats::paired_t(diffs);
      emit_stats({{"t", fmt(r.t)},
                  {"df", fmt(r.df)},
                  {"p_two_sided", fmt(r.p_two_sided)},
                  {"p_one_sided", fmt(r.p_one_sided)},
                  {"infinite_t", r.infinite_t ? "1" : "0"}},
                 stats_out, "stats-paired", {{"file", stats_file}});
      return 0;
    }
    if (*corr) {
      auto table = csv::read_table(stats_file, {"x", "y"});
      std::vector<double> xs, ys;
      for (const auto& row : table.rows) {
        xs.push_back(std::stod(row[0]));
        ys.push_back(std::stod(row[1]));
      }
      emit_stats({{"r", fmt(stats::pearson_corr(xs, ys))},
                  {"n", std::to_string(xs.size())}},
                 stats_out, "stats-corr", {{"file", stats_file}});
      return 0;
    }
    if (*lmm) {
      auto table = csv::read_table(stats_file, {"rating", "participant_id", "item_id", "condition"});
      std::vector<stats::RatingRow> rows;
      for (const auto& row : table.rows)
        rows.push_back({std::stod(row[0]), row[1], row[2], std::stoi(row[3])});
      auto full = stats::fit_lmm(rows, true);
      auto null_fit = stats::fit_lmm(rows, false);
      auto lrt = stats::likelihood_ratio_test(full, null_fit);
      emit_stats({{"beta_intercept", fmt(full.beta_intercept)},
                  {"beta_condition", fmt(*full.beta_condition)},
                  {"sigma2_participant", fmt(full.sigma2_participant)},
                  {"sigma2_item", fmt(full.sigma2_item)},
                  {"sigma2_residual", fmt(full.sigma2_residual)},
                  {"loglik_full", fmt(full.log_likelihood)},
                  {"loglik_null", fmt(null_fit.log_likelihood)},
                  {"chi_square", fmt(lrt.chi_square)},
                  {"lrt_df", std::to_string(lrt.df)},
                  {"p", fmt(lrt.p)}},
                 stats_out, "stats-lmm", {{"data", stats_file}});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace prefshare::cli
