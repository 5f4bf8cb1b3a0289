#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "threshaug/matrix.hpp"
#include "threshaug/tree.hpp"

namespace threshaug {

enum class RegressorKind { Linear, Tree, RandomForest, Gbt };

const char* to_string(RegressorKind kind) noexcept;
std::optional<RegressorKind> parse_regressor_kind(const std::string& text);

/// How many features a random-forest split examines.
struct FeatureFraction {
  enum class Rule { Sqrt, Third, All, Count } rule = Rule::All;
  std::size_t count = 0;

  std::size_t resolve(std::size_t d) const noexcept;
  std::string to_string() const;
  static std::optional<FeatureFraction> parse(const std::string& text);
  bool operator==(const FeatureFraction&) const = default;
};

/// One concrete hyperparameter assignment. Fields a kind does not use are
/// ignored by it.
struct RegressorParams {
  int max_depth = -1;  // negative = unlimited
  std::size_t min_leaf = 1;
  std::size_t n_trees = 100;
  FeatureFraction max_features{};
  double learning_rate = 0.1;
  std::size_t n_stages = 100;

  bool operator==(const RegressorParams&) const = default;
};

struct RegressorSpec {
  RegressorKind kind = RegressorKind::Linear;
  std::string name;  // label used in records; defaults to the kind name
  RegressorParams params;
  std::vector<RegressorParams> grid;

  bool tunable() const noexcept { return kind != RegressorKind::Linear; }
};

/// Default grids for the tunable kinds, in grid order (last listed
/// parameter varies fastest).
///   tree:          max_depth {4, 8, 16, unlimited} x min_leaf {1, 5, 20}
///   random_forest: n_trees 100, max_depth {8, 16, unlimited} x features {sqrt, third, all}
///   gbt:           learning_rate {0.05, 0.1, 0.3} x n_stages {100, 300} x max_depth {3, 6}
std::vector<RegressorParams> default_grid(RegressorKind kind);
RegressorSpec default_spec(RegressorKind kind);

/// Parameters relevant to `kind`, as "key=value" pairs joined by ';'.
std::string describe_params(RegressorKind kind, const RegressorParams& p);

struct LinearModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
};

struct TreeModel {
  DecisionTree tree;
};

struct ForestRegressorModel {
  std::vector<DecisionTree> trees;
};

struct BoostedModel {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> stages;
};

class RegressorModel {
 public:
  using State = std::variant<LinearModel, TreeModel, ForestRegressorModel, BoostedModel>;

  RegressorModel(State state, std::size_t n_features)
      : state_(std::move(state)), n_features_(n_features) {}

  const State& state() const noexcept { return state_; }
  std::size_t n_features() const noexcept { return n_features_; }
  RegressorKind kind() const noexcept { return static_cast<RegressorKind>(state_.index()); }

 private:
  State state_;
  std::size_t n_features_;
};

/// Least-squares linear model with an intercept column; rank-deficient
/// designs get the minimum-norm solution.
LinearModel fit_linear(const Matrix& x, std::span<const double> y);

RegressorModel fit_regressor(RegressorKind kind, const RegressorParams& params, const Matrix& x,
                             std::span<const double> y, std::uint64_t seed = 0);

std::vector<double> predict_regressor(const RegressorModel& m, const Matrix& x);

/// Training SSE after each boosting stage, F_0 included (size n_stages + 1).
std::vector<double> boosting_training_curve(const Matrix& x, std::span<const double> y,
                                            const RegressorParams& params);

}  // namespace threshaug
