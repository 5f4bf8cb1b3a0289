#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "threshaug/discretizer.hpp"
#include "threshaug/error.hpp"
#include "threshaug/random.hpp"

using namespace threshaug;

TEST_CASE("uniform 1..10 with s = 4 gives midpoints between fifths") {
  std::vector<double> y(10);
  std::iota(y.begin(), y.end(), 1.0);
  const auto t = compute_thresholds(y, 4);
  CHECK(t.thresholds == std::vector<double>{2.5, 4.5, 6.5, 8.5});
  CHECK(t.effective_s() == 4);
  CHECK(t.requested_s == 4);
  CHECK(t.warnings.empty());

  const auto labels = encode_classes(y, t);
  const auto first = labels.column(0);
  CHECK(std::count(first.begin(), first.end(), 1) == 2);
}

TEST_CASE("tied targets merge thresholds with a warning") {
  const std::vector<double> y{1, 1, 1, 1, 1, 1, 1, 1, 9, 10};
  const auto t = compute_thresholds(y, 4);
  CHECK(t.thresholds == std::vector<double>{1, 5});
  CHECK(t.effective_s() == 2);
  CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("threshold at the training maximum is dropped") {
  const std::vector<double> y{1, 2, 3, 3, 3, 3};
  const auto t = compute_thresholds(y, 2);
  // Raw midpoints are 2.5 and 3; the second would put every row in class 1.
  CHECK(t.thresholds == std::vector<double>{2.5});
  CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("invalid s and short inputs are rejected") {
  const std::vector<double> y{1, 2, 3};
  CHECK_THROWS_AS(compute_thresholds(y, 0), Error);
  CHECK_THROWS_AS(compute_thresholds(y, 3), Error);
  const std::vector<double> flat{2, 2, 2, 2};
  CHECK_THROWS_AS(compute_thresholds(flat, 1), Error);
}

TEST_CASE("encode_classes compares with <=") {
  ThresholdSet t;
  t.thresholds = {1.5, 2.5, 3.5};
  const std::vector<double> y{2.0, 0.0, 2.5};
  const auto labels = encode_classes(y, t);
  CHECK(labels.at(0, 0) == 0);
  CHECK(labels.at(0, 1) == 1);
  CHECK(labels.at(0, 2) == 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(labels.at(1, i) == 0 + (0.0 <= t.thresholds[i]));
  CHECK(labels.at(2, 1) == 1);
}

TEST_CASE("values outside the threshold range encode to constant rows") {
  std::vector<double> y(20);
  std::iota(y.begin(), y.end(), 0.0);
  const auto t = compute_thresholds(y, 5);
  // Below every threshold means inferior to all of them.
  const std::vector<double> probe{-1.0, 100.0};
  const auto labels = encode_classes(probe, t);
  for (std::size_t i = 0; i < labels.cols; ++i) {
    CHECK(labels.at(0, i) == 1);
    CHECK(labels.at(1, i) == 0);
  }
}

TEST_CASE("bin sizes put the remainder in the first bins") {
  CHECK(equal_frequency_bin_sizes(10, 2) == std::vector<std::size_t>{4, 3, 3});
  CHECK(equal_frequency_bin_sizes(11, 2) == std::vector<std::size_t>{4, 4, 3});
  CHECK(equal_frequency_bin_sizes(9, 2) == std::vector<std::size_t>{3, 3, 3});
}

TEST_CASE("random distinct targets: oracle agreement, balance, class mass") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t s = 1 + rng.index(16);
    const std::size_t n = s + 1 + rng.index(200 - s);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal() * 3.0;
    const auto t = compute_thresholds(y, s);
    CHECK(t.thresholds == oracle::thresholds(y, s));
    CHECK(t.effective_s() == s);
    for (std::size_t i = 1; i < t.thresholds.size(); ++i) CHECK(t.thresholds[i] > t.thresholds[i - 1]);

    const auto sizes = equal_frequency_bin_sizes(n, s);
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);

    const auto labels = encode_classes(y, t);
    for (std::size_t i = 0; i < labels.cols; ++i) {
      const auto col = labels.column(i);
      const double ones = static_cast<double>(std::count(col.begin(), col.end(), 1));
      const double minority = std::min(ones, static_cast<double>(n) - ones) / static_cast<double>(n);
      CHECK(minority >= 1.0 / static_cast<double>(s + 1) - 1.0 / static_cast<double>(n));
    }
  }
}

TEST_CASE("labels are non-decreasing across thresholds") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t s = 1 + rng.index(12);
    std::vector<double> y(s + 1 + rng.index(80));
    for (auto& v : y) v = static_cast<double>(rng.index(15));  // ties are common here
    ThresholdSet t;
    try {
      t = compute_thresholds(y, s);
    } catch (const Error&) {
      continue;
    }
    std::vector<double> probe(50);
    for (auto& v : probe) v = rng.uniform(-2.0, 17.0);
    const auto labels = encode_classes(probe, t);
    for (std::size_t r = 0; r < labels.rows; ++r) {
      for (std::size_t i = 1; i < labels.cols; ++i) CHECK(labels.at(r, i - 1) <= labels.at(r, i));
    }
  }
}
