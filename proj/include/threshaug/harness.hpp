#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "threshaug/augment.hpp"
#include "threshaug/dataset.hpp"
#include "threshaug/forest.hpp"
#include "threshaug/regressors.hpp"
#include "threshaug/target_transform.hpp"

namespace threshaug {

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Seeded permutation of 0..n-1 cut into k contiguous test blocks whose sizes
/// differ by at most one (the first n mod k blocks are larger). Indices are
/// sorted inside each list.
std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

/// Splits 0..n-1 into a fitting part and a validation part holding
/// round(validation_fraction * n) rows, both sorted.
struct TuningSplit {
  std::vector<std::size_t> fit;
  std::vector<std::size_t> validation;
};
TuningSplit tuning_split(std::size_t n, double validation_fraction, std::uint64_t seed);

/// Per-column centering-reduction fitted on training rows. Columns with zero
/// spread keep scale 1.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  Matrix apply(const Matrix& x) const;
  bool operator==(const FeatureScaler&) const = default;
};
FeatureScaler fit_feature_scaler(const Matrix& x_train);

/// Best grid point by validation RMSE; ties keep the earlier point. A
/// non-tunable spec returns its params unchanged.
RegressorParams grid_search(const RegressorSpec& spec, const Matrix& x_fit,
                            std::span<const double> y_fit, const Matrix& x_val,
                            std::span<const double> y_val, std::uint64_t seed = 0);

struct DatasetConfig {
  std::string name;
  std::string path;
  std::string target;
  LoadOptions load;
};

struct ExperimentConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<std::size_t> s_values;
  std::vector<RegressorSpec> regressors;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  double tuning_fraction = 0.3;
  ForestParams forest;
  std::string output_dir;
  unsigned jobs = 1;
};

/// Checks the invariants run_experiment relies on; throws ErrorCode::Config.
void validate_config(const ExperimentConfig& config);

/// Everything fitted on one training fold before any regressor sees it.
struct FoldState {
  FeatureScaler scaler;
  TargetTransform target;
  std::vector<std::optional<Augmenter>> augmenters;  // one per s value
  std::vector<std::string> augmenter_errors;         // empty string when fit succeeded
  Matrix x_train;
  Matrix x_test;
  std::vector<double> y_train;
  std::vector<double> y_test;
};

/// Fits scaler, target transform and one augmenter per s on the training
/// rows of `split`, and applies them to both sides. Test targets are read
/// only to transform them for scoring.
FoldState fit_fold_state(const Dataset& ds, const FoldSplit& split,
                         std::span<const std::size_t> s_values, const ForestParams& forest,
                         std::uint64_t seed);

struct ExperimentRecord {
  std::string dataset;
  std::size_t fold = 0;
  std::string regressor;
  RegressorKind kind = RegressorKind::Linear;
  std::optional<std::size_t> s;  // empty for the native variant
  std::optional<std::size_t> effective_s;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  std::string params;
  std::optional<std::string> error;
  double wall_time_s = 0.0;

  bool augmented() const noexcept { return s.has_value(); }
  bool ok() const noexcept { return !error.has_value(); }
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
};

using LogFn = std::function<void(const std::string&)>;

ExperimentResult run_experiment(const ExperimentConfig& config, const LogFn& log = {});

}  // namespace threshaug
