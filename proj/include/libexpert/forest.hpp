#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "libexpert/rng.hpp"

namespace libexpert {

struct ForestParams {
  int trees = 100;
  int max_depth = 0;  // 0 = unbounded
  enum class FeatureRule { sqrt_p, log2_p, all };
  FeatureRule feature_rule = FeatureRule::sqrt_p;
  bool bootstrap = true;
  int min_samples_split = 2;
};

const char* feature_rule_name(ForestParams::FeatureRule rule);

// One node of a CART tree; feature -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0;  // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  int leaf_class = -1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

// Bagged CART trees with gini splits and per-split feature subsampling.
// Prediction is the majority vote over trees; class scores are vote
// fractions. Deterministic for a fixed seed.
class RandomForest {
 public:
  static RandomForest train(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels, int n_classes,
                            const ForestParams& params, Rng& rng);

  std::vector<int> predict(const std::vector<std::vector<double>>& rows) const;
  std::vector<std::vector<double>> predict_scores(
      const std::vector<std::vector<double>>& rows) const;

  int n_classes() const { return n_classes_; }
  std::size_t tree_count() const { return trees_.size(); }

 private:
  int tree_vote(const DecisionTree& tree, const std::vector<double>& x) const;

  std::vector<DecisionTree> trees_;
  int n_classes_ = 0;
};

}  // namespace libexpert
