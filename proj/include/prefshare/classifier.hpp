#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "prefshare/features.hpp"

namespace prefshare {

// Axis-aligned binary tree over the six-feature vector. Internal nodes send
// "<= threshold" left and "> threshold" right; leaves carry the label
// (true = Shared, false = Non-shared).
struct TreeNode {
  bool is_leaf = true;
  bool label = false;
  int feature = -1;
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left, right;
};

struct DecisionTree {
  std::unique_ptr<TreeNode> root;
};

struct TreeParams {
  int max_depth = 5;
  int min_leaf = 5;
  std::vector<int> allowed_features = {0, 1, 2, 3, 4, 5};  // indexes into FeatureVector

  void validate() const;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  bool no_positive_predictions = false;  // precision was defined as 0
};

struct EvalReport {
  std::vector<std::vector<Metrics>> fold_metrics;  // [dataset][fold]
  std::vector<Metrics> dataset_means;
  Metrics grand_mean;
};

// Greedy CART with Gini impurity. Split thresholds are midpoints of
// consecutive distinct sorted feature values; a split must leave min_leaf
// samples in each child and strictly reduce weighted impurity. Leaf labels
// are the majority, with ties resolved to Non-shared.
DecisionTree train_tree(const BalancedDataset& data, const TreeParams& params);

bool predict(const DecisionTree& tree, const FeatureVector& fv);

// Text format used by the study write-ups:
//   sharer_sim <= 0.0101: Non-shared
//   sharer_sim > 0.0101
//   | sharer_prom <= 1: Non-shared
//   | sharer_prom > 1: Shared
// with "| " indentation per depth. A tree that is a single leaf prints as
// one label line. Parsing tolerates trailing blanks and missing spaces
// around the comparison operators.
std::string tree_to_text(const DecisionTree& tree);
DecisionTree tree_from_text(const std::string& text);

Metrics metrics(const std::vector<bool>& predictions, const std::vector<bool>& truth);

// Per dataset: shuffle with a derived seed, split into label-stratified
// folds, train on folds-1 and evaluate on the held-out fold, recomputing
// each instance's promiscuity from the training fold only. Fold metrics
// average to dataset means, dataset means to the grand mean.
EvalReport cross_validate(const std::vector<BalancedDataset>& datasets, const TreeParams& params,
                          int folds, std::uint64_t seed, int jobs = 1);

// Feature groups as used in the share-prediction comparison table.
enum class FeatureGroup { Item, Recipient, Sender, SenderRecipient };

const char* to_string(FeatureGroup g);
std::vector<int> feature_indexes(FeatureGroup g);

std::vector<std::pair<FeatureGroup, EvalReport>> ablation(
    const std::vector<FeatureGroup>& groups, const std::vector<BalancedDataset>& datasets,
    const TreeParams& params, int folds, std::uint64_t seed, int jobs = 1);

}  // namespace prefshare
