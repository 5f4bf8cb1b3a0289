#include "threshaug/augment.hpp"

#include <charconv>
#include <ostream>

#include "threshaug/parallel.hpp"

namespace threshaug {

Augmenter fit_augmenter(const Matrix& x_train, std::span<const double> y_train_transformed,
                        std::size_t s, const ForestParams& forest_params, std::uint64_t seed,
                        unsigned jobs) {
  if (x_train.rows() != y_train_transformed.size()) {
    throw Error(ErrorCode::Dimension, "training rows and target length differ");
  }
  ThresholdSet thresholds = compute_thresholds(y_train_transformed, s);
  const BinaryLabels labels = encode_classes(y_train_transformed, thresholds);

  std::vector<ForestModel> classifiers(thresholds.effective_s());
  parallel_for(classifiers.size(), jobs, [&](std::size_t i) {
    const auto column = labels.column(i);
    classifiers[i] = fit_forest_classifier(x_train, column, forest_params, seed + i);
  });
  return Augmenter(std::move(thresholds), std::move(classifiers), x_train.cols());
}

Matrix constructed_features(const Augmenter& a, const Matrix& x) {
  if (x.cols() != a.fitted_d()) {
    throw Error(ErrorCode::Dimension, "augmenter expects " + std::to_string(a.fitted_d()) +
                                          " columns, got " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), a.effective_s());
  for (std::size_t i = 0; i < a.effective_s(); ++i) {
    const auto p = predict_class_probability(a.classifiers()[i], x);
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, i) = p[r];
  }
  return out;
}

Matrix augment_features(const Augmenter& a, const Matrix& x) {
  return x.hconcat(constructed_features(a, x));
}

std::vector<std::string> constructed_feature_names(std::size_t effective_s) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= effective_s; ++i) names.push_back("X_prime_" + std::to_string(i));
  return names;
}

void write_features(std::ostream& out, const Matrix& m, const std::vector<std::string>& names,
                    char delimiter) {
  if (names.size() != m.cols()) {
    throw Error(ErrorCode::Dimension, "header names do not match column count");
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << delimiter;
    out << names[c];
  }
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << delimiter;
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), m(r, c));
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

}  // namespace threshaug
