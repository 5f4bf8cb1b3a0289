#include "threshaug/discretizer.hpp"

#include <algorithm>

#include "threshaug/error.hpp"

namespace threshaug {

std::vector<std::uint8_t> BinaryLabels::column(std::size_t c) const {
  std::vector<std::uint8_t> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

std::vector<std::size_t> equal_frequency_bin_sizes(std::size_t n, std::size_t s) {
  const std::size_t bins = s + 1;
  std::vector<std::size_t> sizes(bins, n / bins);
  for (std::size_t b = 0; b < n % bins; ++b) ++sizes[b];
  return sizes;
}

ThresholdSet compute_thresholds(std::span<const double> y_train, std::size_t s) {
  if (s < 1) {
    throw Error(ErrorCode::InvalidArgument, "number of thresholds must be at least 1");
  }
  if (y_train.size() < s + 1) {
    throw Error(ErrorCode::InvalidArgument,
                "need at least " + std::to_string(s + 1) + " training values for " +
                    std::to_string(s) + " thresholds, got " + std::to_string(y_train.size()));
  }
  std::vector<double> sorted(y_train.begin(), y_train.end());
  std::sort(sorted.begin(), sorted.end());

  ThresholdSet out;
  out.requested_s = s;
  const auto sizes = equal_frequency_bin_sizes(sorted.size(), s);
  std::size_t end = 0;
  std::size_t merged = 0;
  for (std::size_t b = 0; b < s; ++b) {
    end += sizes[b];
    const double t = 0.5 * (sorted[end - 1] + sorted[end]);
    if (!out.thresholds.empty() && t <= out.thresholds.back()) {
      ++merged;
      continue;
    }
    out.thresholds.push_back(t);
  }
  if (merged > 0) {
    out.warnings.push_back("tied target values merged " + std::to_string(merged) +
                           " duplicate thresholds");
  }
  if (!out.thresholds.empty() && out.thresholds.back() >= sorted.back()) {
    out.thresholds.pop_back();
    out.warnings.push_back("dropped a threshold at the training maximum");
  }
  if (out.thresholds.empty()) {
    throw Error(ErrorCode::Degenerate, "degenerate target: no usable threshold");
  }
  return out;
}

BinaryLabels encode_classes(std::span<const double> y, const ThresholdSet& t) {
  BinaryLabels labels;
  labels.rows = y.size();
  labels.cols = t.effective_s();
  labels.values.resize(labels.rows * labels.cols);
  for (std::size_t r = 0; r < labels.rows; ++r) {
    for (std::size_t i = 0; i < labels.cols; ++i) {
      labels.values[r * labels.cols + i] = y[r] <= t.thresholds[i] ? 1 : 0;
    }
  }
  return labels;
}

}  // namespace threshaug
