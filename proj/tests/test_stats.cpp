#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "threshaug/error.hpp"
#include "threshaug/random.hpp"
#include "threshaug/stats.hpp"

using namespace threshaug;

TEST_CASE("rmse") {
  const std::vector<double> y{1, 2, 3};
  CHECK(rmse(y, y) == 0.0);
  CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(3.5355339).epsilon(1e-8));
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), Error);
  CHECK_THROWS_AS(rmse(y, std::vector<double>{1, 2}), Error);

  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20), ca(20), cb(20);
    const double c = rng.uniform(-5, 5);
    for (std::size_t i = 0; i < 20; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
      ca[i] = c * a[i];
      cb[i] = c * b[i];
    }
    CHECK(rmse(a, b) > 0.0);
    CHECK(rmse(ca, cb) == doctest::Approx(std::abs(c) * rmse(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("paired t-test") {
  SUBCASE("identical samples") {
    const std::vector<double> a{0.3, 0.4, 0.5};
    const auto r = paired_t_test(a, a);
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("d = 2, 4, 6") {
    const std::vector<double> a{2, 4, 6}, b{0, 0, 0};
    const auto r = paired_t_test(a, b);
    CHECK(r.t == doctest::Approx(3.4641016).epsilon(1e-7));
    CHECK(r.p == doctest::Approx(0.0742).epsilon(1e-3));
    CHECK(r.p == doctest::Approx(oracle::t_two_sided_p(r.t, 2)).epsilon(1e-8));
  }
  SUBCASE("swapping negates t and keeps p") {
    Rng rng(2);
    std::vector<double> a(10), b(10);
    for (std::size_t i = 0; i < 10; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal() + 0.3;
    }
    const auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
    CHECK(ab.t == -ba.t);
    CHECK(ab.p == ba.p);
  }
  SUBCASE("constant nonzero difference is p = 0") {
    const std::vector<double> a{3, 4, 5}, b{2, 3, 4};
    CHECK(paired_t_test(a, b).p == 0.0);
  }
  SUBCASE("too short") {
    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), Error);
  }
}

TEST_CASE("t tail agrees with numerical integration") {
  for (double df : {1.0, 2.0, 5.0, 9.0, 30.0}) {
    for (double t : {0.0, 0.1, 0.7, 1.5, 2.262, 4.0, 9.0}) {
      CHECK(student_t_two_sided_p(t, df) == doctest::Approx(oracle::t_two_sided_p(t, df)).epsilon(1e-8));
      CHECK(student_t_two_sided_p(-t, df) == student_t_two_sided_p(t, df));
    }
  }
}

TEST_CASE("incomplete beta identities") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(0.2, 20), b = rng.uniform(0.2, 20), x = rng.uniform();
    CHECK(incomplete_beta(a, b, x) + incomplete_beta(b, a, 1 - x) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(incomplete_beta(a, 1, x) == doctest::Approx(std::pow(x, a)).epsilon(1e-10));
    CHECK(incomplete_beta(1, 1, x) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK(incomplete_beta(2, 3, 0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1) == 1.0);
}

TEST_CASE("comparison outcome rule") {
  CHECK(win_tie_loss(std::vector<ComparisonCell>{}) == WinTieLoss{});
  ComparisonCell c;
  c.p_value = 0.04;
  c.native_rmse_mean = 1.0;
  c.aug_rmse_mean = 0.5;
  c.outcome = Outcome::Win;
  const auto w = win_tie_loss(std::vector<ComparisonCell>{c});
  CHECK(w.wins == 1);

  // Five folds each, significant gain.
  const std::vector<double> native{1.0, 1.1, 0.9, 1.05, 0.95}, aug{0.5, 0.62, 0.41, 0.55, 0.44};
  const auto win = compare(native, aug);
  CHECK(win.outcome == Outcome::Win);
  CHECK(compare(aug, native).outcome == Outcome::Loss);
  CHECK(win.native_rmse_mean == doctest::Approx(1.0));
  const std::vector<double> noisy{1.5, 0.5, 1.4, 0.6, 1.0};
  const auto tie = compare(native, noisy);
  CHECK(tie.p_value >= kSignificanceLevel);
  CHECK(tie.outcome == Outcome::Tie);
}

TEST_CASE("33-dataset linear-regression comparison tallies 0/4/29") {
  // native mean, augmented mean, augmented marked significant
  struct Row {
    double native, aug;
    bool significant;
  };
  const std::vector<Row> rows{
      {0.9867, 0.0930, true},  {0.3269, 0.2672, true},  {0.7176, 0.2351, true},  {0.8260, 0.4865, true},
      {0.7833, 0.4180, true},  {0.4749, 0.2847, true},  {0.7163, 0.2547, true},  {0.8307, 0.6434, true},
      {0.7248, 0.2183, true},  {0.2702, 0.1967, true},  {0.6312, 0.5485, false}, {0.6751, 0.6031, false},
      {0.6331, 0.2732, true},  {0.3002, 0.1096, true},  {0.7996, 0.5791, true},  {0.5961, 0.3156, true},
      {0.6828, 0.4242, true},  {0.8752, 0.8066, true},  {0.6492, 0.5418, true},  {0.1803, 0.0845, true},
      {0.6342, 0.1750, true},  {1.1822, 1.0677, false}, {0.3975, 0.0561, true},  {0.8022, 0.4283, true},
      {0.9472, 0.7816, true},  {0.8453, 0.5179, true},  {0.4872, 0.2807, true},  {1.9533, 0.0504, false},
      {0.6347, 0.0696, true},  {0.2536, 0.1157, true},  {0.6990, 0.4839, true},  {0.9998, 0.4589, true},
      {0.8569, 0.8079, true}};
  REQUIRE(rows.size() == 33);

  // Ten synthetic folds per dataset reproduce each mean; the spread of the
  // paired differences decides significance.
  std::vector<ComparisonCell> cells;
  for (const auto& r : rows) {
    const double gap = r.native - r.aug;
    const double spread = r.significant ? 1e-3 * gap : 10.0 * gap;
    std::vector<double> native(10), aug(10);
    for (std::size_t f = 0; f < 10; ++f) {
      native[f] = r.native + (f % 2 ? spread : -spread);
      aug[f] = r.aug;
    }
    const auto cell = compare(native, aug);
    CHECK(cell.native_rmse_mean == doctest::Approx(r.native));
    cells.push_back(cell);
  }
  const auto w = win_tie_loss(cells);
  CHECK(w.losses == 0);
  CHECK(w.ties == 4);
  CHECK(w.wins == 29);
}

TEST_CASE("average ranks") {
  CHECK(average_ranks(std::vector<double>{0.3, 0.1, 0.2}) == std::vector<double>{3, 1, 2});
  CHECK(average_ranks(std::vector<double>{0.5, 0.5}) == std::vector<double>{1.5, 1.5});
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.index(8);
    std::vector<double> v(k);
    for (auto& x : v) x = static_cast<double>(rng.index(4));  // frequent ties
    const auto r = average_ranks(v);
    CHECK(r == oracle::ranks(v));
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == static_cast<double>(k * (k + 1)) / 2.0);
  }
}

TEST_CASE("Friedman mean ranks") {
  const Matrix always(3, 2, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.9});
  const auto s = friedman_mean_ranks(always);
  CHECK(s.mean_ranks == std::vector<double>{1.0, 2.0});
  CHECK(s.n_datasets == 3);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5, k = 3;
    Matrix t(n, k);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < k; ++c) t(r, c) = static_cast<double>(rng.index(5));
    const auto got = friedman_mean_ranks(t);
    std::vector<double> sums(k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto rr = oracle::ranks(std::vector<double>(t.row(r).begin(), t.row(r).end()));
      for (std::size_t c = 0; c < k; ++c) sums[c] += rr[c];
    }
    double sq = 0;
    for (std::size_t c = 0; c < k; ++c) {
      CHECK(got.mean_ranks[c] == doctest::Approx(sums[c] / n));
      sq += sums[c] * sums[c];
    }
    // Rank-sum form of the statistic.
    const double chi2 = 12.0 / (n * k * (k + 1.0)) * sq - 3.0 * n * (k + 1.0);
    CHECK(got.friedman_chi2 == doctest::Approx(chi2).epsilon(1e-9));
  }
  CHECK_THROWS_AS(friedman_mean_ranks(Matrix(1, 3)), Error);
  CHECK_THROWS_AS(friedman_mean_ranks(Matrix(3, 1)), Error);
}

TEST_CASE("Nemenyi critical difference") {
  CHECK(nemenyi_cd(5, 33) == doctest::Approx(1.0619).epsilon(1e-4));
  for (std::size_t n : {2u, 7u, 33u}) {
    CHECK(nemenyi_cd(2, n) == doctest::Approx(1.960 / std::sqrt(static_cast<double>(n))).epsilon(1e-12));
    CHECK(nemenyi_cd(4, 4 * n) == doctest::Approx(nemenyi_cd(4, n) / 2).epsilon(1e-12));
  }
  CHECK_THROWS_AS(nemenyi_cd(11, 5), Error);
  CHECK_THROWS_AS(nemenyi_cd(1, 5), Error);
}
