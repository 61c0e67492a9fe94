#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "prefshare/core.hpp"
#include "prefshare/similarity.hpp"

namespace prefshare::diffusion {

class SocialGraph {
 public:
  void add_node(const UserId& node);
  void add_edge(const UserId& src, const UserId& dst);  // self-loops rejected

  const std::set<UserId>& nodes() const { return nodes_; }
  const std::vector<UserId>& out_neighbors(const UserId& node) const;

 private:
  std::set<UserId> nodes_;
  std::map<UserId, std::vector<UserId>> out_;
};

enum class QuotaMode { PerStep, Lifetime };

struct CascadeConfig {
  double theta_pref = 0.2;       // candidate gate on the sender's preference
  int salience_window = 2;       // steps an item stays salient after receipt
  double weight_sender = 3.0;    // a; sender preference dominates
  double weight_recipient = 1.0; // b
  double bias = -2.0;            // c
  double quota = 2.0;            // accepted shares per node (per step or lifetime)
  std::map<UserId, double> quota_overrides;
  QuotaMode quota_mode = QuotaMode::PerStep;
  int max_steps = 20;

  double quota_for(const UserId& node) const;
  // Enforces theta in [0,1], window/steps >= 1, quotas >= 0 and the model's
  // ordering constraint a > b >= 0.
  void validate() const;
};

struct CascadeState {
  // Per node: adopted items and salient items with remaining window steps.
  std::map<UserId, std::set<ItemId>> adopted;
  std::map<UserId, std::map<ItemId, int>> salient;
  int step = 0;

  bool quiescent() const;
  bool operator==(const CascadeState&) const = default;
};

struct ShareEvent {
  int step = 0;
  UserId sender;
  UserId recipient;
  ItemId item;
  bool operator==(const ShareEvent&) const = default;
};

struct CascadeResult {
  // adoption_series[item][t] = number of adopters after step t (index 0 =
  // initial seeding); counts are non-decreasing.
  std::map<ItemId, std::vector<int>> adoption_series;
  std::map<ItemId, std::set<UserId>> final_adopters;
  std::map<ItemId, std::int64_t> shares_attempted;
  std::map<ItemId, std::int64_t> shares_accepted;
  std::vector<ShareEvent> share_log;
  int steps_run = 0;
};

// Logistic share propensity sigma(a*pref(u,i) + b*pref(v,i) + c), gated to 0
// when the sender's preference is below theta_pref. Pure formula; config
// validation happens at run() time.
double share_probability(const UserId& u, const UserId& v, const ItemId& i,
                         const LikesMatrix& likes, const CascadeConfig& config);

// One synchronous round: every node shares from its start-of-step salient
// items (gated, capped at its quota, highest probability first with ties by
// recipient then item id); existing salience decays; arrivals become salient
// with a fresh window and are adopted with probability pref(recipient, item).
// Randomness is drawn per (sender, recipient, item, step) from the seed, so
// iteration order is irrelevant and runs with a shared seed are coupled.
void step(CascadeState& state, const SocialGraph& graph, const LikesMatrix& likes,
          const CascadeConfig& config, std::uint64_t seed, CascadeResult* result = nullptr);

// Runs until quiescence (no salient items anywhere) or max_steps.
CascadeResult run(const SocialGraph& graph, const std::map<UserId, std::vector<ItemId>>& seeds,
                  const LikesMatrix& likes, const CascadeConfig& config, std::uint64_t rng_seed);

// Standard independent cascade: each newly adopted node gets one chance per
// out-edge to transmit with fixed probability p.
CascadeResult baseline_ic(const SocialGraph& graph,
                          const std::map<UserId, std::vector<ItemId>>& seeds, double p,
                          int max_steps, std::uint64_t rng_seed);

// graph.csv: src,dst (directed edges).
SocialGraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const SocialGraph& graph);

// seeds.csv: user_id,item_id.
std::map<UserId, std::vector<ItemId>> load_seeds(const std::filesystem::path& path);

// Flat key=value file covering every CascadeConfig field (theta_pref,
// salience_window, weight_sender, weight_recipient, bias, quota, quota_mode,
// max_steps). Missing keys keep their defaults; unknown keys are an error.
CascadeConfig load_config(const std::filesystem::path& path);

}  // namespace prefshare::diffusion
