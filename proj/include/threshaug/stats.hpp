#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "threshaug/matrix.hpp"

namespace threshaug {

double rmse(std::span<const double> y, std::span<const double> y_hat);

double mean(std::span<const double> v);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
};

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Paired t-test on d = a - b with n - 1 degrees of freedom. When the
/// differences have zero spread, p is 1 for a zero mean and 0 otherwise.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

enum class Outcome { Win, Tie, Loss };

const char* to_string(Outcome o) noexcept;

inline constexpr double kSignificanceLevel = 0.05;

/// Native-versus-augmented comparison for one dataset and regressor; the
/// outcome is read from the augmented variant's side.
struct ComparisonCell {
  double native_rmse_mean = 0.0;
  double aug_rmse_mean = 0.0;
  double p_value = 1.0;
  Outcome outcome = Outcome::Tie;
};

ComparisonCell compare(std::span<const double> native_rmse, std::span<const double> aug_rmse);

struct WinTieLoss {
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  bool operator==(const WinTieLoss&) const = default;
};

WinTieLoss win_tie_loss(std::span<const ComparisonCell> cells);

/// Ascending ranks with ties sharing the average rank (1 = smallest).
std::vector<double> average_ranks(std::span<const double> values);

struct RankSummary {
  std::vector<double> mean_ranks;
  std::size_t n_datasets = 0;
  double friedman_chi2 = 0.0;
  double iman_davenport_f = 0.0;
  double cd = 0.0;
};

/// rmse_table is datasets x variants; rank 1 is the lowest RMSE. The critical
/// difference is filled in with nemenyi_cd at alpha.
RankSummary friedman_mean_ranks(const Matrix& rmse_table, double alpha = 0.05);

/// Studentized-range critical value divided by sqrt(2), for k in [2, 10].
double nemenyi_q(std::size_t k, double alpha = 0.05);

/// CD = q_alpha(k) * sqrt(k (k + 1) / (6 N)).
double nemenyi_cd(std::size_t k, std::size_t n_datasets, double alpha = 0.05);

}  // namespace threshaug
