#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "threshaug/matrix.hpp"
#include "threshaug/random.hpp"

namespace threshaug {

/// One node of a binary CART tree, stored in preorder in a flat vector.
/// Rows with x[feature] <= split_value go left.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double split_value = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf mean (regression) or majority class (classification)
  std::uint32_t count0 = 0;
  std::uint32_t count1 = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct TreeParams {
  int max_depth = -1;          // negative means unlimited
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // features examined per split; 0 means all
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {}

  const TreeNode& leaf_for(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return leaf_for(row).value; }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t depth() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

/// Gini impurity of a two-class node with counts (a, b): 1 - (a^2 + b^2)/(a + b)^2.
double gini_impurity(double a, double b) noexcept;

/// Grows a Gini classification tree on the rows listed in `samples`
/// (duplicates count with multiplicity, as in a bootstrap draw). Leaves vote
/// for class 1 only on a strict majority. `rng` is needed only when
/// params.max_features is smaller than the feature count.
DecisionTree grow_classification_tree(const Matrix& x, std::span<const std::uint8_t> labels,
                                      std::span<const std::uint32_t> samples,
                                      const TreeParams& params, Rng* rng);

/// Grows a variance-reduction regression tree; leaf value is the mean target.
DecisionTree grow_regression_tree(const Matrix& x, std::span<const double> y,
                                  std::span<const std::uint32_t> samples, const TreeParams& params,
                                  Rng* rng);

}  // namespace threshaug
