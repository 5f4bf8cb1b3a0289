#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "threshaug/discretizer.hpp"
#include "threshaug/forest.hpp"
#include "threshaug/matrix.hpp"

namespace threshaug {

/// Thresholds fitted on one training fold plus one forest per threshold,
/// each trained on that fold's inferiority labels.
class Augmenter {
 public:
  Augmenter(ThresholdSet thresholds, std::vector<ForestModel> classifiers, std::size_t fitted_d)
      : thresholds_(std::move(thresholds)),
        classifiers_(std::move(classifiers)),
        fitted_d_(fitted_d) {}

  const ThresholdSet& thresholds() const noexcept { return thresholds_; }
  const std::vector<ForestModel>& classifiers() const noexcept { return classifiers_; }
  std::size_t fitted_d() const noexcept { return fitted_d_; }
  std::size_t effective_s() const noexcept { return classifiers_.size(); }

  bool operator==(const Augmenter&) const = default;

 private:
  ThresholdSet thresholds_;
  std::vector<ForestModel> classifiers_;
  std::size_t fitted_d_;
};

/// Thresholds come from compute_thresholds(y, s); classifier i is a forest
/// fitted on label column i with seed + i. `jobs` spreads the S fits over
/// threads without changing the result.
Augmenter fit_augmenter(const Matrix& x_train, std::span<const double> y_train_transformed,
                        std::size_t s, const ForestParams& forest_params, std::uint64_t seed,
                        unsigned jobs = 1);

/// X' (n x effective_s): column i holds P(C_i = 1 | x).
Matrix constructed_features(const Augmenter& a, const Matrix& x);

/// X'' = [X | X'].
Matrix augment_features(const Augmenter& a, const Matrix& x);

/// Delimited dump of X' or X'' with a header row; X' columns are named
/// X_prime_1 .. X_prime_S.
void write_features(std::ostream& out, const Matrix& m, const std::vector<std::string>& names,
                    char delimiter = ',');
std::vector<std::string> constructed_feature_names(std::size_t effective_s);

}  // namespace threshaug
