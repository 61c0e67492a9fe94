#include "prefshare/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <thread>

#include "prefshare/csv.hpp"
#include "prefshare/rng.hpp"

namespace prefshare {

namespace {

double gini(std::size_t pos, std::size_t total) {
  if (total == 0) return 0.0;
  double p = static_cast<double>(pos) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

struct Sample {
  std::array<double, kNumFeatures> x;
  bool y;
};

SplitChoice best_split(const std::vector<Sample>& data, const std::vector<std::size_t>& idx,
                       const TreeParams& params) {
  const std::size_t n = idx.size();
  std::size_t pos = 0;
  for (auto i : idx) pos += data[i].y;
  const double parent_impurity = gini(pos, n);

  SplitChoice best;
  std::vector<std::pair<double, bool>> column(n);
  for (int f : params.allowed_features) {
    for (std::size_t r = 0; r < n; ++r)
      column[r] = {data[idx[r]].x[f], data[idx[r]].y};
    std::sort(column.begin(), column.end());

    std::size_t left_n = 0, left_pos = 0;
    for (std::size_t r = 0; r + 1 < n; ++r) {
      ++left_n;
      left_pos += column[r].second;
      if (column[r].first == column[r + 1].first) continue;  // not a boundary
      std::size_t right_n = n - left_n;
      if (left_n < static_cast<std::size_t>(params.min_leaf) ||
          right_n < static_cast<std::size_t>(params.min_leaf))
        continue;
      double threshold = column[r].first + (column[r + 1].first - column[r].first) / 2.0;
      double w_left = static_cast<double>(left_n) / n;
      double child_impurity = w_left * gini(left_pos, left_n) +
                              (1.0 - w_left) * gini(pos - left_pos, right_n);
      double decrease = parent_impurity - child_impurity;
      if (decrease > best.decrease + 1e-12 ||
          (best.found && std::abs(decrease - best.decrease) <= 1e-12 &&
           (f < best.feature || (f == best.feature && threshold < best.threshold)))) {
        best = {true, f, threshold, decrease};
      }
    }
  }
  if (best.found && best.decrease <= 1e-12) best.found = false;
  return best;
}

std::unique_ptr<TreeNode> grow(const std::vector<Sample>& data, std::vector<std::size_t>& idx,
                               int depth, const TreeParams& params) {
  auto node = std::make_unique<TreeNode>();
  std::size_t pos = 0;
  for (auto i : idx) pos += data[i].y;
  const std::size_t n = idx.size();
  // Majority label; exact ties resolve to Non-shared.
  node->label = 2 * pos > n;

  if (pos == 0 || pos == n || depth >= params.max_depth) return node;
  auto split = best_split(data, idx, params);
  if (!split.found) return node;

  std::vector<std::size_t> left_idx, right_idx;
  std::size_t left_pos = 0, right_pos = 0;
  for (auto i : idx) {
    if (data[i].x[split.feature] <= split.threshold) {
      left_idx.push_back(i);
      left_pos += data[i].y;
    } else {
      right_idx.push_back(i);
      right_pos += data[i].y;
    }
  }
  // Accepted splits must not raise the weighted child impurity.
  double w_left = static_cast<double>(left_idx.size()) / n;
  double child = w_left * gini(left_pos, left_idx.size()) +
                 (1.0 - w_left) * gini(right_pos, right_idx.size());
  if (child > gini(pos, n) + 1e-9)
    throw std::logic_error("split increased weighted impurity");

  node->is_leaf = false;
  node->feature = split.feature;
  node->threshold = split.threshold;
  node->left = grow(data, left_idx, depth + 1, params);
  node->right = grow(data, right_idx, depth + 1, params);
  return node;
}

bool predict_node(const TreeNode* node, const std::array<double, kNumFeatures>& x) {
  while (!node->is_leaf)
    node = x[node->feature] <= node->threshold ? node->left.get() : node->right.get();
  return node->label;
}

Metrics mean_metrics(const std::vector<Metrics>& parts) {
  Metrics m;
  for (const auto& p : parts) {
    m.precision += p.precision;
    m.recall += p.recall;
    m.accuracy += p.accuracy;
    m.no_positive_predictions = m.no_positive_predictions || p.no_positive_predictions;
  }
  if (!parts.empty()) {
    m.precision /= parts.size();
    m.recall /= parts.size();
    m.accuracy /= parts.size();
  }
  return m;
}

void run_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

void TreeParams::validate() const {
  if (max_depth < 1) throw ContractError("max_depth must be >= 1");
  if (min_leaf < 1) throw ContractError("min_leaf must be >= 1");
  if (allowed_features.empty()) throw ContractError("allowed feature set must not be empty");
  for (int f : allowed_features)
    if (f < 0 || f >= kNumFeatures) throw ContractError("feature index out of range");
}

DecisionTree train_tree(const BalancedDataset& data, const TreeParams& params) {
  params.validate();
  if (data.instances.empty()) throw ContractError("train_tree requires non-empty data");
  std::vector<Sample> samples(data.instances.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = {data.instances[i].features.as_array(), data.instances[i].label};
  std::vector<std::size_t> idx(samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  DecisionTree tree;
  tree.root = grow(samples, idx, 0, params);
  return tree;
}

bool predict(const DecisionTree& tree, const FeatureVector& fv) {
  if (!tree.root) throw ContractError("predict on an empty tree");
  return predict_node(tree.root.get(), fv.as_array());
}

namespace {

const char* label_name(bool label) { return label ? "Shared" : "Non-shared"; }

void print_node(const TreeNode* node, int depth, std::string& out) {
  std::string indent;
  for (int i = 0; i < depth; ++i) indent += "| ";
  if (node->is_leaf) {
    // Only reachable for a root that is a single leaf.
    out += indent;
    out += label_name(node->label);
    out += '\n';
    return;
  }
  const std::string feat = kFeatureNames[node->feature];
  const std::string thr = csv::format_double(node->threshold);
  out += indent + feat + " <= " + thr;
  if (node->left->is_leaf) {
    out += ": ";
    out += label_name(node->left->label);
    out += '\n';
  } else {
    out += '\n';
    print_node(node->left.get(), depth + 1, out);
  }
  out += indent + feat + " > " + thr;
  if (node->right->is_leaf) {
    out += ": ";
    out += label_name(node->right->label);
    out += '\n';
  } else {
    out += '\n';
    print_node(node->right.get(), depth + 1, out);
  }
}

struct ParsedLine {
  int depth = 0;
  int feature = -1;
  double threshold = 0.0;
  bool is_upper = false;       // "> threshold" branch
  bool has_label = false;
  bool label = false;
  bool bare_label = false;     // line is just a label (single-leaf tree)
};

int feature_index(const std::string& name) {
  for (int i = 0; i < kNumFeatures; ++i)
    if (name == kFeatureNames[i]) return i;
  throw ValidationError("unknown feature name in tree text: '" + name + "'");
}

bool parse_label(const std::string& s, const std::string& line) {
  if (s == "Shared") return true;
  if (s == "Non-shared") return false;
  throw ValidationError("bad label in tree line: '" + line + "'");
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

ParsedLine parse_line(const std::string& raw) {
  ParsedLine p;
  std::size_t pos = 0;
  while (raw.compare(pos, 2, "| ") == 0) {
    ++p.depth;
    pos += 2;
  }
  std::string body = strip(raw.substr(pos));
  std::size_t op = body.find("<=");
  std::size_t op_len = 2;
  if (op == std::string::npos) {
    op = body.find('>');
    op_len = 1;
    if (op == std::string::npos) {
      p.bare_label = true;
      p.has_label = true;
      p.label = parse_label(body, raw);
      return p;
    }
    p.is_upper = true;
  }
  p.feature = feature_index(strip(body.substr(0, op)));
  std::string rest = strip(body.substr(op + op_len));
  std::string num = rest;
  std::size_t colon = rest.find(':');
  if (colon != std::string::npos) {
    num = strip(rest.substr(0, colon));
    p.has_label = true;
    p.label = parse_label(strip(rest.substr(colon + 1)), raw);
  }
  char* end = nullptr;
  p.threshold = std::strtod(num.c_str(), &end);
  if (end == num.c_str() || *end != '\0' || !std::isfinite(p.threshold))
    throw ValidationError("bad threshold in tree line: '" + raw + "'");
  return p;
}

std::unique_ptr<TreeNode> parse_subtree(const std::vector<ParsedLine>& lines, std::size_t& cursor,
                                        int depth) {
  if (cursor >= lines.size()) throw ValidationError("tree text ended mid-node");
  const ParsedLine& lower = lines[cursor];
  if (lower.depth != depth || lower.is_upper)
    throw ValidationError("malformed tree text: expected a '<=' line at depth " +
                          std::to_string(depth));
  ++cursor;
  auto node = std::make_unique<TreeNode>();
  node->is_leaf = false;
  node->feature = lower.feature;
  node->threshold = lower.threshold;
  if (lower.has_label) {
    node->left = std::make_unique<TreeNode>();
    node->left->label = lower.label;
  } else {
    node->left = parse_subtree(lines, cursor, depth + 1);
  }
  if (cursor >= lines.size()) throw ValidationError("tree text missing the '>' branch");
  const ParsedLine& upper = lines[cursor];
  if (upper.depth != depth || !upper.is_upper || upper.feature != lower.feature ||
      upper.threshold != lower.threshold)
    throw ValidationError("tree text '>' line does not match its '<=' line");
  ++cursor;
  if (upper.has_label) {
    node->right = std::make_unique<TreeNode>();
    node->right->label = upper.label;
  } else {
    node->right = parse_subtree(lines, cursor, depth + 1);
  }
  return node;
}

}  // namespace

std::string tree_to_text(const DecisionTree& tree) {
  if (!tree.root) throw ContractError("tree_to_text on an empty tree");
  std::string out;
  print_node(tree.root.get(), 0, out);
  return out;
}

DecisionTree tree_from_text(const std::string& text) {
  std::vector<ParsedLine> lines;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (strip(raw).empty()) continue;
    lines.push_back(parse_line(raw));
  }
  if (lines.empty()) throw ValidationError("empty tree text");
  DecisionTree tree;
  if (lines.size() == 1 && lines[0].bare_label) {
    tree.root = std::make_unique<TreeNode>();
    tree.root->label = lines[0].label;
    return tree;
  }
  std::size_t cursor = 0;
  tree.root = parse_subtree(lines, cursor, 0);
  if (cursor != lines.size()) throw ValidationError("trailing lines after tree root");
  return tree;
}

Metrics metrics(const std::vector<bool>& predictions, const std::vector<bool>& truth) {
  if (predictions.size() != truth.size())
    throw ContractError("metrics: prediction/truth length mismatch");
  if (predictions.empty()) throw ContractError("metrics: empty inputs");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] && truth[i]) ++tp;
    else if (predictions[i] && !truth[i]) ++fp;
    else if (!predictions[i] && truth[i]) ++fn;
    else ++tn;
  }
  Metrics m;
  if (tp + fp == 0) {
    m.precision = 0.0;
    m.no_positive_predictions = true;
  } else {
    m.precision = static_cast<double>(tp) / (tp + fp);
  }
  m.recall = (tp + fn == 0) ? 0.0 : static_cast<double>(tp) / (tp + fn);
  m.accuracy = static_cast<double>(tp + tn) / predictions.size();
  return m;
}

EvalReport cross_validate(const std::vector<BalancedDataset>& datasets, const TreeParams& params,
                          int folds, std::uint64_t seed, int jobs) {
  params.validate();
  if (folds < 2) throw ContractError("cross_validate requires folds >= 2");
  for (const auto& ds : datasets)
    if (ds.instances.size() < static_cast<std::size_t>(folds))
      throw ContractError("dataset smaller than the fold count");

  EvalReport report;
  report.fold_metrics.resize(datasets.size());
  report.dataset_means.resize(datasets.size());

  run_indexed(datasets.size(), jobs, [&](std::size_t d) {
    const auto& ds = datasets[d];
    auto rng = make_engine(derive_seed(seed, "cv-dataset", d));

    // Stratified fold assignment: shuffle positives and negatives separately,
    // then deal them round-robin; per-fold positive counts differ by <= 1.
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.instances.size(); ++i)
      (ds.instances[i].label ? pos : neg).push_back(i);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<int> fold_of(ds.instances.size());
    for (std::size_t r = 0; r < pos.size(); ++r) fold_of[pos[r]] = static_cast<int>(r % folds);
    for (std::size_t r = 0; r < neg.size(); ++r) fold_of[neg[r]] = static_cast<int>(r % folds);

    std::vector<Metrics> fold_results;
    for (int f = 0; f < folds; ++f) {
      BalancedDataset train;
      std::vector<std::size_t> test_idx;
      for (std::size_t i = 0; i < ds.instances.size(); ++i) {
        if (fold_of[i] == f) {
          test_idx.push_back(i);
        } else {
          train.instances.push_back(ds.instances[i]);
        }
      }
      // Fold-local promiscuity: count positives per sender in the training
      // fold only, then rewrite the feature on both sides of the split.
      std::map<UserId, double> prom;
      for (const auto& inst : train.instances)
        if (inst.label) prom[inst.record.sender] += 1.0;
      auto local_prom = [&prom](const UserId& sender) {
        auto it = prom.find(sender);
        return it == prom.end() ? 0.0 : it->second;
      };
      for (auto& inst : train.instances)
        inst.features.sender_promiscuity = local_prom(inst.record.sender);

      auto tree = train_tree(train, params);

      std::vector<bool> preds, truth;
      for (std::size_t i : test_idx) {
        FeatureVector fv = ds.instances[i].features;
        fv.sender_promiscuity = local_prom(ds.instances[i].record.sender);
        preds.push_back(predict(tree, fv));
        truth.push_back(ds.instances[i].label);
      }
      fold_results.push_back(metrics(preds, truth));
    }
    report.fold_metrics[d] = fold_results;
    report.dataset_means[d] = mean_metrics(fold_results);
  });

  report.grand_mean = mean_metrics(report.dataset_means);
  return report;
}

const char* to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Item: return "item";
    case FeatureGroup::Recipient: return "recipient";
    case FeatureGroup::Sender: return "sender";
    case FeatureGroup::SenderRecipient: return "sender+recipient";
  }
  return "?";
}

std::vector<int> feature_indexes(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Item: return {4, 5};
    case FeatureGroup::Recipient: return {1, 2};
    case FeatureGroup::Sender: return {0, 3};
    case FeatureGroup::SenderRecipient: return {0, 1, 2, 3};
  }
  return {};
}

std::vector<std::pair<FeatureGroup, EvalReport>> ablation(
    const std::vector<FeatureGroup>& groups, const std::vector<BalancedDataset>& datasets,
    const TreeParams& params, int folds, std::uint64_t seed, int jobs) {
  if (groups.empty()) throw ContractError("ablation requires at least one feature group");
  std::vector<std::pair<FeatureGroup, EvalReport>> out;
  for (auto g : groups) {
    TreeParams restricted = params;
    restricted.allowed_features = feature_indexes(g);
    out.emplace_back(g, cross_validate(datasets, restricted, folds, seed, jobs));
  }
  return out;
}

}  // namespace prefshare
