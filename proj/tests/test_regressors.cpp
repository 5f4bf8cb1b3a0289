#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "threshaug/error.hpp"
#include "threshaug/random.hpp"
#include "threshaug/regressors.hpp"
#include "threshaug/stats.hpp"

using namespace threshaug;

namespace {

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d) {
  Matrix x(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) x(r, c) = rng.uniform(-1, 1);
  return x;
}

std::vector<std::vector<double>> rows_of(const Matrix& x) {
  std::vector<std::vector<double>> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r].assign(x.row(r).begin(), x.row(r).end());
  return out;
}

}  // namespace

TEST_CASE("linear through two points") {
  const Matrix x(2, 1, std::vector<double>{0, 1});
  const std::vector<double> y{0, 2};
  const auto m = fit_regressor(RegressorKind::Linear, {}, x, y);
  const auto& lin = std::get<LinearModel>(m.state());
  CHECK(lin.coefficients[0] == doctest::Approx(2.0));
  CHECK(lin.intercept == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(predict_regressor(m, Matrix(1, 1, std::vector<double>{2}))[0] == doctest::Approx(4.0));
  CHECK(predict_regressor(m, Matrix(1, 1, std::vector<double>{3}))[0] == doctest::Approx(6.0));
}

TEST_CASE("linear matches normal equations and residuals are orthogonal") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 60, d = 5;
    const auto x = random_matrix(rng, n, d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 1.5 - x(i, 0) + 3 * x(i, 3) + 0.2 * rng.normal();
    const auto lin = fit_linear(x, y);
    const auto beta = oracle::normal_equations(rows_of(x), y);
    CHECK(lin.intercept == doctest::Approx(beta[0]).epsilon(1e-9));
    for (std::size_t j = 0; j < d; ++j) CHECK(lin.coefficients[j] == doctest::Approx(beta[j + 1]).epsilon(1e-9));

    const auto pred = predict_regressor(RegressorModel(lin, d), x);
    double rsum = 0;
    for (std::size_t i = 0; i < n; ++i) rsum += y[i] - pred[i];
    CHECK(std::abs(rsum) < 1e-8);
    for (std::size_t j = 0; j < d; ++j) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += (y[i] - pred[i]) * x(i, j);
      CHECK(std::abs(dot) < 1e-8);
    }
  }
}

TEST_CASE("rank-deficient design gets the minimum-norm solution") {
  Rng rng(2);
  const std::size_t n = 40;
  Matrix x(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform(-1, 1);
    x(i, 1) = x(i, 0);  // duplicated column
    y[i] = 4 * x(i, 0) + 1;
  }
  const auto lin = fit_linear(x, y);
  CHECK(lin.coefficients[0] == doctest::Approx(2.0));
  CHECK(lin.coefficients[1] == doctest::Approx(2.0));
  CHECK(lin.intercept == doctest::Approx(1.0));
}

TEST_CASE("depth-0 tree predicts the mean") {
  Rng rng(3);
  const auto x = random_matrix(rng, 30, 2);
  std::vector<double> y(30);
  for (auto& v : y) v = rng.normal();
  RegressorParams p;
  p.max_depth = 0;
  const auto m = fit_regressor(RegressorKind::Tree, p, x, y);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 30.0;
  for (double v : predict_regressor(m, random_matrix(rng, 5, 2))) CHECK(v == doctest::Approx(mean));
}

TEST_CASE("unlimited tree interpolates distinct training rows exactly") {
  Rng rng(4);
  const auto x = random_matrix(rng, 100, 3);
  std::vector<double> y(100);
  for (auto& v : y) v = rng.normal();
  const auto m = fit_regressor(RegressorKind::Tree, {}, x, y);
  CHECK(predict_regressor(m, x) == y);
}

TEST_CASE("regression root split matches exhaustive enumeration") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.index(25), d = 1 + rng.index(3);
    const auto x = random_matrix(rng, n, d);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal();
    RegressorParams p;
    p.max_depth = 1;
    p.min_leaf = 1 + rng.index(3);
    const auto m = fit_regressor(RegressorKind::Tree, p, x, y);
    const auto& root = std::get<TreeModel>(m.state()).tree.nodes()[0];
    const auto best = oracle::best_sse_split(rows_of(x), y, p.min_leaf);
    if (best.feature < 0) {
      CHECK(root.is_leaf());
      continue;
    }
    REQUIRE_FALSE(root.is_leaf());
    std::vector<double> l, r;
    for (std::size_t i = 0; i < n; ++i) (x(i, static_cast<std::size_t>(root.feature)) <= root.split_value ? l : r).push_back(y[i]);
    auto sse = [](const std::vector<double>& v) {
      const double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double s = 0;
      for (double a : v) s += (a - mu) * (a - mu);
      return s;
    };
    CHECK(sse(l) + sse(r) == doctest::Approx(best.cost).epsilon(1e-9));
  }
}

TEST_CASE("one full-rate boosting stage with a deep tree fits the training set") {
  Rng rng(6);
  const auto x = random_matrix(rng, 50, 2);
  std::vector<double> y(50);
  for (auto& v : y) v = rng.normal();
  RegressorParams p;
  p.learning_rate = 1.0;
  p.n_stages = 1;
  p.max_depth = -1;
  const auto m = fit_regressor(RegressorKind::Gbt, p, x, y);
  CHECK(rmse(y, predict_regressor(m, x)) < 1e-12);
}

TEST_CASE("boosting training SSE never increases") {
  Rng rng(7);
  for (double eta : {0.05, 0.3, 1.0}) {
    const auto x = random_matrix(rng, 120, 3);
    std::vector<double> y(120);
    for (std::size_t i = 0; i < 120; ++i) y[i] = std::sin(3 * x(i, 0)) + x(i, 1) * x(i, 2) + 0.1 * rng.normal();
    RegressorParams p;
    p.learning_rate = eta;
    p.n_stages = 40;
    p.max_depth = 3;
    const auto curve = boosting_training_curve(x, y, p);
    REQUIRE(curve.size() == 41);
    for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] <= curve[k - 1] * (1 + 1e-12));
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 120.0;
    double sst = 0;
    for (double v : y) sst += (v - mean) * (v - mean);
    CHECK(curve[0] == doctest::Approx(sst));
  }
}

TEST_CASE("forest of constant trees predicts the constant") {
  TreeNode leaf;
  leaf.value = 2.5;
  ForestRegressorModel f;
  f.trees.assign(7, DecisionTree({leaf}, 2));
  const RegressorModel m(f, 2);
  for (double v : predict_regressor(m, Matrix(4, 2, 0.3))) CHECK(v == 2.5);
}

TEST_CASE("random forest regressor is deterministic for a seed") {
  Rng rng(8);
  const auto x = random_matrix(rng, 80, 4);
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) y[i] = x(i, 0) * x(i, 1) + rng.normal() * 0.1;
  RegressorParams p;
  p.n_trees = 20;
  p.max_features = FeatureFraction{FeatureFraction::Rule::Sqrt, 0};
  const auto a = predict_regressor(fit_regressor(RegressorKind::RandomForest, p, x, y, 11), x);
  const auto b = predict_regressor(fit_regressor(RegressorKind::RandomForest, p, x, y, 11), x);
  const auto c = predict_regressor(fit_regressor(RegressorKind::RandomForest, p, x, y, 12), x);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("dimension mismatch and too few rows are errors") {
  const Matrix x(3, 2, 0.5);
  const std::vector<double> y{1, 2, 3};
  const auto m = fit_regressor(RegressorKind::Linear, {}, x, y);
  CHECK_THROWS_AS(predict_regressor(m, Matrix(1, 3)), Error);
  CHECK_THROWS_AS(fit_regressor(RegressorKind::Linear, {}, Matrix(1, 2), std::vector<double>{1}), Error);
  CHECK_THROWS_AS(fit_regressor(RegressorKind::Linear, {}, x, std::vector<double>{1, 2}), Error);
}

TEST_CASE("default grids follow the documented order") {
  CHECK(default_grid(RegressorKind::Linear).empty());
  const auto tree = default_grid(RegressorKind::Tree);
  REQUIRE(tree.size() == 12);
  CHECK(tree[0].max_depth == 4);
  CHECK(tree[1].min_leaf == 5);
  CHECK(tree[11].max_depth == -1);
  CHECK(default_grid(RegressorKind::RandomForest).size() == 9);
  const auto gbt = default_grid(RegressorKind::Gbt);
  REQUIRE(gbt.size() == 12);
  CHECK(gbt[1].max_depth == 6);
  CHECK(gbt[2].n_stages == 300);
  CHECK(gbt[4].learning_rate == 0.1);
  CHECK(default_spec(RegressorKind::Tree).tunable());
  CHECK_FALSE(default_spec(RegressorKind::Linear).tunable());
  CHECK(describe_params(RegressorKind::Tree, tree[11]) == "max_depth=unlimited;min_leaf=20");
}

TEST_CASE("feature fraction parsing") {
  CHECK(FeatureFraction::parse("sqrt")->rule == FeatureFraction::Rule::Sqrt);
  CHECK(FeatureFraction::parse("3")->count == 3);
  CHECK_FALSE(FeatureFraction::parse("0"));
  CHECK_FALSE(FeatureFraction::parse("half"));
  CHECK(parse_regressor_kind("random_forest") == RegressorKind::RandomForest);
  CHECK_FALSE(parse_regressor_kind("svm"));
}
