#include "threshaug/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "threshaug/error.hpp"

namespace threshaug {

double mean(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "mean of an empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double rmse(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) {
    throw Error(ErrorCode::Dimension, "rmse: length mismatch");
  }
  if (y.empty()) throw Error(ErrorCode::InvalidArgument, "rmse: empty vectors");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - y_hat[i];
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(y.size()));
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::InvalidArgument, "incomplete_beta: a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::Dimension, "paired_t_test: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "paired_t_test: need at least 2 pairs");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double md = mean(d);
  double ss = 0.0;
  for (double v : d) ss += (v - md) * (v - md);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  if (sd == 0.0) {
    r.t = md == 0.0 ? 0.0 : std::copysign(INFINITY, md);
    r.p = md == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = md / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(n - 1));
  return r;
}

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Win: return "win";
    case Outcome::Tie: return "tie";
    case Outcome::Loss: return "loss";
  }
  return "tie";
}

ComparisonCell compare(std::span<const double> native_rmse, std::span<const double> aug_rmse) {
  ComparisonCell cell;
  cell.native_rmse_mean = mean(native_rmse);
  cell.aug_rmse_mean = mean(aug_rmse);
  cell.p_value = paired_t_test(native_rmse, aug_rmse).p;
  if (cell.p_value >= kSignificanceLevel) {
    cell.outcome = Outcome::Tie;
  } else {
    cell.outcome = cell.aug_rmse_mean < cell.native_rmse_mean ? Outcome::Win : Outcome::Loss;
  }
  return cell;
}

WinTieLoss win_tie_loss(std::span<const ComparisonCell> cells) {
  WinTieLoss w;
  for (const auto& c : cells) {
    switch (c.outcome) {
      case Outcome::Win: ++w.wins; break;
      case Outcome::Tie: ++w.ties; break;
      case Outcome::Loss: ++w.losses; break;
    }
  }
  return w;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(k);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = avg;
    i = j + 1;
  }
  return ranks;
}

RankSummary friedman_mean_ranks(const Matrix& rmse_table, double alpha) {
  const std::size_t n = rmse_table.rows();
  const std::size_t k = rmse_table.cols();
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "Friedman ranks need at least 2 variants");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "Friedman ranks need at least 2 datasets");
  RankSummary out;
  out.n_datasets = n;
  out.mean_ranks.assign(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto ranks = average_ranks(rmse_table.row(r));
    for (std::size_t c = 0; c < k; ++c) out.mean_ranks[c] += ranks[c];
  }
  for (double& m : out.mean_ranks) m /= static_cast<double>(n);

  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  double sum_sq = 0.0;
  for (double m : out.mean_ranks) sum_sq += m * m;
  out.friedman_chi2 = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  const double denom = nd * (kd - 1.0) - out.friedman_chi2;
  out.iman_davenport_f = denom > 0.0 ? (nd - 1.0) * out.friedman_chi2 / denom : INFINITY;
  out.cd = k <= 10 ? nemenyi_cd(k, n, alpha) : NAN;
  return out;
}

double nemenyi_q(std::size_t k, double alpha) {
  // Two-tailed Nemenyi critical values (studentized range / sqrt 2), k = 2..10.
  static constexpr std::array<double, 9> q05 = {1.960, 2.343, 2.569, 2.728, 2.850,
                                                2.949, 3.031, 3.102, 3.164};
  static constexpr std::array<double, 9> q10 = {1.645, 2.052, 2.291, 2.459, 2.589,
                                                2.693, 2.780, 2.855, 2.920};
  if (k < 2 || k > 10) {
    throw Error(ErrorCode::InvalidArgument,
                "Nemenyi q is tabulated for 2..10 variants, got " + std::to_string(k));
  }
  if (alpha == 0.05) return q05[k - 2];
  if (alpha == 0.10) return q10[k - 2];
  throw Error(ErrorCode::InvalidArgument, "Nemenyi q is tabulated for alpha 0.05 and 0.10 only");
}

double nemenyi_cd(std::size_t k, std::size_t n_datasets, double alpha) {
  if (n_datasets < 2) throw Error(ErrorCode::InvalidArgument, "nemenyi_cd: need at least 2 datasets");
  const double kd = static_cast<double>(k);
  return nemenyi_q(k, alpha) * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n_datasets)));
}

}  // namespace threshaug
