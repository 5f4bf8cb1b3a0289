#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "threshaug/matrix.hpp"
#include "threshaug/tree.hpp"

namespace threshaug {

struct ForestParams {
  std::size_t n_trees = 100;
  int max_depth = -1;
  std::size_t min_leaf = 1;
  /// Features examined per split; 0 selects floor(sqrt(d)).
  std::size_t max_features = 0;
  bool bootstrap = true;
  /// Threads used to grow trees. Does not affect the result.
  unsigned jobs = 1;
};

/// floor(sqrt(d)), at least 1.
std::size_t sqrt_features(std::size_t d) noexcept;

/// Bagged Gini trees. Tree t draws its bootstrap sample and feature subsets
/// from Rng(derive_seed(seed, t)), so trees can be grown in any order.
class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::vector<DecisionTree> trees, std::size_t n_features, std::uint64_t seed,
              std::size_t max_features)
      : trees_(std::move(trees)),
        n_features_(n_features),
        seed_(seed),
        max_features_(max_features) {}

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  std::size_t n_trees() const noexcept { return trees_.size(); }
  std::size_t n_features() const noexcept { return n_features_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t max_features() const noexcept { return max_features_; }

  /// Number of trees whose leaf votes for class 1.
  std::size_t votes(std::span<const double> row) const;

  bool operator==(const ForestModel&) const = default;

 private:
  std::vector<DecisionTree> trees_;
  std::size_t n_features_ = 0;
  std::uint64_t seed_ = 0;
  std::size_t max_features_ = 0;
};

ForestModel fit_forest_classifier(const Matrix& x, std::span<const std::uint8_t> labels,
                                  const ForestParams& params, std::uint64_t seed);

/// P(class 1 | x) per row: votes / n_trees.
std::vector<double> predict_class_probability(const ForestModel& m, const Matrix& x);

/// Text format, one token stream:
///   threshaug-forest 1
///   <n_trees> <n_features> <seed> <max_features>
///   per tree: "tree <node_count>" then nodes in preorder, each either
///     "S <feature> <split_value>"  or  "L <count0> <count1> <value>"
/// Reals are written as hex floats so a load reproduces the model bit for bit.
void save_forest(const ForestModel& m, std::ostream& out);
ForestModel load_forest(std::istream& in);

std::string to_string(const ForestModel& m);

}  // namespace threshaug
