#include "prefshare/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "prefshare/csv.hpp"
#include "prefshare/rng.hpp"

namespace prefshare::diffusion {

namespace {

const std::vector<UserId> kNoNeighbors;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Exogenous uniform for one (sender, recipient, item, step) event.
double share_draw(std::uint64_t seed, const UserId& u, const UserId& v, const ItemId& i, int step) {
  std::uint64_t h = derive_seed(seed, "share");
  h = mix64(h ^ hash_str(u));
  h = mix64(h ^ hash_str(v));
  h = mix64(h ^ hash_str(i));
  h = mix64(h ^ static_cast<std::uint64_t>(step));
  return u01_from_bits(h);
}

double adopt_draw(std::uint64_t seed, const UserId& v, const ItemId& i, int step) {
  std::uint64_t h = derive_seed(seed, "adopt");
  h = mix64(h ^ hash_str(v));
  h = mix64(h ^ hash_str(i));
  h = mix64(h ^ static_cast<std::uint64_t>(step));
  return u01_from_bits(h);
}

void record_adoption_step(CascadeResult& result, const std::map<ItemId, std::set<UserId>>& adopters_by_item) {
  for (auto& [item, series] : result.adoption_series) {
    auto it = adopters_by_item.find(item);
    series.push_back(it == adopters_by_item.end() ? 0 : static_cast<int>(it->second.size()));
  }
}

std::map<ItemId, std::set<UserId>> adopters_by_item(const CascadeState& state) {
  std::map<ItemId, std::set<UserId>> out;
  for (const auto& [node, items] : state.adopted)
    for (const auto& item : items) out[item].insert(node);
  return out;
}

}  // namespace

void SocialGraph::add_node(const UserId& node) {
  if (node.empty()) throw ValidationError("empty node id");
  nodes_.insert(node);
}

void SocialGraph::add_edge(const UserId& src, const UserId& dst) {
  if (src == dst) throw ValidationError("self-loop on node " + src);
  add_node(src);
  add_node(dst);
  auto& out = out_[src];
  auto it = std::lower_bound(out.begin(), out.end(), dst);
  if (it == out.end() || *it != dst) out.insert(it, dst);
}

const std::vector<UserId>& SocialGraph::out_neighbors(const UserId& node) const {
  auto it = out_.find(node);
  return it == out_.end() ? kNoNeighbors : it->second;
}

double CascadeConfig::quota_for(const UserId& node) const {
  auto it = quota_overrides.find(node);
  return it == quota_overrides.end() ? quota : it->second;
}

void CascadeConfig::validate() const {
  if (!(theta_pref >= 0.0 && theta_pref <= 1.0))
    throw ValidationError("theta_pref must lie in [0,1]");
  if (salience_window < 1) throw ValidationError("salience_window must be >= 1");
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (quota < 0.0) throw ValidationError("quota must be >= 0");
  for (const auto& [node, q] : quota_overrides)
    if (q < 0.0) throw ValidationError("negative quota for node " + node);
  if (!(weight_sender > weight_recipient && weight_recipient >= 0.0))
    throw ValidationError("share weights must satisfy a > b >= 0");
}

bool CascadeState::quiescent() const {
  for (const auto& [node, items] : salient)
    if (!items.empty()) return false;
  return true;
}

double share_probability(const UserId& u, const UserId& v, const ItemId& i,
                         const LikesMatrix& likes, const CascadeConfig& config) {
  const double pref_u = user_item_preference(u, i, likes);
  if (pref_u < config.theta_pref) return 0.0;  // gate, by contract
  const double pref_v = user_item_preference(v, i, likes);
  return logistic(config.weight_sender * pref_u + config.weight_recipient * pref_v + config.bias);
}

void step(CascadeState& state, const SocialGraph& graph, const LikesMatrix& likes,
          const CascadeConfig& config, std::uint64_t seed, CascadeResult* result) {
  struct Candidate {
    double prob;
    UserId recipient;
    ItemId item;
  };
  std::vector<ShareEvent> outgoing;

  for (const auto& node : graph.nodes()) {
    auto sal_it = state.salient.find(node);
    if (sal_it == state.salient.end() || sal_it->second.empty()) continue;
    const auto& neighbors = graph.out_neighbors(node);
    if (neighbors.empty()) continue;

    double budget = config.quota_for(node);
    if (config.quota_mode == QuotaMode::Lifetime && result) {
      for (const auto& ev : result->share_log)
        if (ev.sender == node) budget -= 1.0;
    }
    if (budget < 1.0) continue;

    std::vector<Candidate> candidates;
    for (const auto& [item, window] : sal_it->second) {
      if (window < 1) continue;
      const double pref_u = user_item_preference(node, item, likes);
      if (pref_u < config.theta_pref) continue;
      for (const auto& v : neighbors) {
        const double pref_v = user_item_preference(v, item, likes);
        candidates.push_back(
            {logistic(config.weight_sender * pref_u + config.weight_recipient * pref_v +
                      config.bias),
             v, item});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.prob != b.prob) return a.prob > b.prob;
      if (a.recipient != b.recipient) return a.recipient < b.recipient;
      return a.item < b.item;
    });

    int accepted = 0;
    for (const auto& c : candidates) {
      if (accepted >= static_cast<int>(budget)) break;
      if (result) ++result->shares_attempted[c.item];
      if (share_draw(seed, node, c.recipient, c.item, state.step) <= c.prob) {
        ++accepted;
        outgoing.push_back({state.step, node, c.recipient, c.item});
      }
    }
  }

  // Decay start-of-step salience.
  for (auto& [node, items] : state.salient) {
    for (auto it = items.begin(); it != items.end();) {
      if (--it->second <= 0) {
        it = items.erase(it);
      } else {
        ++it;
      }
    }
  }

  // Deliver shares: refresh salience and draw adoption once per (v,i,step).
  for (const auto& ev : outgoing) {
    if (result) {
      ++result->shares_accepted[ev.item];
      result->share_log.push_back(ev);
    }
    auto& window = state.salient[ev.recipient][ev.item];
    window = std::max(window, config.salience_window);
    if (!state.adopted[ev.recipient].count(ev.item) &&
        adopt_draw(seed, ev.recipient, ev.item, state.step) <=
            user_item_preference(ev.recipient, ev.item, likes)) {
      state.adopted[ev.recipient].insert(ev.item);
    }
  }
  ++state.step;
}

CascadeResult run(const SocialGraph& graph, const std::map<UserId, std::vector<ItemId>>& seeds,
                  const LikesMatrix& likes, const CascadeConfig& config, std::uint64_t rng_seed) {
  config.validate();
  CascadeResult result;
  if (graph.nodes().empty()) return result;

  CascadeState state;
  std::set<ItemId> items;
  for (const auto& [node, seeded] : seeds) {
    if (!graph.nodes().count(node))
      throw ValidationError("seed user " + node + " is not in the graph");
    for (const auto& item : seeded) {
      state.adopted[node].insert(item);
      auto& window = state.salient[node][item];
      window = std::max(window, config.salience_window);
      items.insert(item);
    }
  }
  for (const auto& item : items) {
    result.adoption_series[item] = {};
    result.shares_attempted[item] = 0;
    result.shares_accepted[item] = 0;
  }
  record_adoption_step(result, adopters_by_item(state));

  while (state.step < config.max_steps && !state.quiescent()) {
    step(state, graph, likes, config, rng_seed, &result);
    record_adoption_step(result, adopters_by_item(state));
  }
  result.final_adopters = adopters_by_item(state);
  result.steps_run = state.step;
  return result;
}

CascadeResult baseline_ic(const SocialGraph& graph,
                          const std::map<UserId, std::vector<ItemId>>& seeds, double p,
                          int max_steps, std::uint64_t rng_seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("transmission probability must lie in [0,1]");
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  CascadeResult result;
  if (graph.nodes().empty()) return result;

  std::map<ItemId, std::set<UserId>> adopters;
  std::map<ItemId, std::set<UserId>> frontier;
  for (const auto& [node, seeded] : seeds) {
    if (!graph.nodes().count(node))
      throw ValidationError("seed user " + node + " is not in the graph");
    for (const auto& item : seeded) {
      adopters[item].insert(node);
      frontier[item].insert(node);
      result.adoption_series[item] = {};
      result.shares_attempted[item] = 0;
      result.shares_accepted[item] = 0;
    }
  }
  record_adoption_step(result, adopters);

  int step_no = 0;
  bool active = true;
  while (active && step_no < max_steps) {
    active = false;
    std::map<ItemId, std::set<UserId>> next_frontier;
    for (auto& [item, nodes] : frontier) {
      for (const auto& u : nodes) {
        for (const auto& v : graph.out_neighbors(u)) {
          if (adopters[item].count(v)) continue;
          ++result.shares_attempted[item];
          // One chance per (edge, item), independent of the step it fires on.
          std::uint64_t h = derive_seed(rng_seed, "ic");
          h = mix64(h ^ hash_str(u));
          h = mix64(h ^ hash_str(v));
          h = mix64(h ^ hash_str(item));
          if (u01_from_bits(h) <= p && p > 0.0) {
            ++result.shares_accepted[item];
            adopters[item].insert(v);
            next_frontier[item].insert(v);
            result.share_log.push_back({step_no, u, v, item});
            active = true;
          }
        }
      }
    }
    frontier = std::move(next_frontier);
    ++step_no;
    record_adoption_step(result, adopters);
  }
  result.final_adopters = adopters;
  result.steps_run = step_no;
  return result;
}

SocialGraph load_graph(const std::filesystem::path& path) {
  auto table = csv::read_table(path, {"src", "dst"});
  SocialGraph graph;
  for (const auto& row : table.rows) graph.add_edge(row[0], row[1]);
  return graph;
}

void save_graph(const std::filesystem::path& path, const SocialGraph& graph) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& node : graph.nodes())
    for (const auto& dst : graph.out_neighbors(node)) rows.push_back({node, dst});
  csv::write_table_atomic(path, {"src", "dst"}, rows);
}

std::map<UserId, std::vector<ItemId>> load_seeds(const std::filesystem::path& path) {
  auto table = csv::read_table(path, {"user_id", "item_id"});
  std::map<UserId, std::vector<ItemId>> seeds;
  for (const auto& row : table.rows) seeds[row[0]].push_back(row[1]);
  return seeds;
}

CascadeConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  CascadeConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    auto as_double = [&] {
      char* end = nullptr;
      double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw ValidationError(path.string() + ": bad number for " + key + ": '" + value + "'");
      return v;
    };
    if (key == "theta_pref") config.theta_pref = as_double();
    else if (key == "salience_window") config.salience_window = static_cast<int>(as_double());
    else if (key == "weight_sender") config.weight_sender = as_double();
    else if (key == "weight_recipient") config.weight_recipient = as_double();
    else if (key == "bias") config.bias = as_double();
    else if (key == "quota") config.quota = as_double();
    else if (key == "max_steps") config.max_steps = static_cast<int>(as_double());
    else if (key == "quota_mode") {
      if (value == "per_step") config.quota_mode = QuotaMode::PerStep;
      else if (value == "lifetime") config.quota_mode = QuotaMode::Lifetime;
      else throw ValidationError(path.string() + ": quota_mode must be per_step or lifetime");
    } else {
      throw ValidationError(path.string() + ": unknown config key '" + key + "'");
    }
  }
  return config;
}

}  // namespace prefshare::diffusion
