#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace threshaug {

/// Strictly increasing thresholds on the (transformed) target scale.
struct ThresholdSet {
  std::vector<double> thresholds;
  std::size_t requested_s = 0;
  std::vector<std::string> warnings;

  std::size_t effective_s() const noexcept { return thresholds.size(); }
  bool operator==(const ThresholdSet&) const = default;
};

/// Row-major n x S 0/1 matrix; column i is the inferiority class y <= t_i.
struct BinaryLabels {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> values;

  std::uint8_t at(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
  std::vector<std::uint8_t> column(std::size_t c) const;
};

/// Sizes of the s+1 equal-frequency bins over n sorted values; the first
/// n mod (s+1) bins hold one extra element.
std::vector<std::size_t> equal_frequency_bin_sizes(std::size_t n, std::size_t s);

/// Equal-frequency thresholds: the midpoint between the last value of bin i
/// and the first value of bin i+1. Repeated thresholds (tied targets) are
/// merged, and a threshold at the training maximum is dropped since every
/// training row would fall in class 1; either event adds a warning.
ThresholdSet compute_thresholds(std::span<const double> y_train, std::size_t s);

BinaryLabels encode_classes(std::span<const double> y, const ThresholdSet& t);

}  // namespace threshaug
