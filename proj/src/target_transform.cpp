#include "threshaug/target_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "threshaug/error.hpp"

namespace threshaug {

namespace {

constexpr double kZeroLambda = 1e-12;

double grid_lambda(int k) {
  return static_cast<double>(k) * kLambdaGridStep;
}

}  // namespace

double box_cox(double w, double lambda) {
  if (w < 1.0) return w - 1.0;
  if (std::fabs(lambda) < kZeroLambda) return std::log(w);
  return (std::pow(w, lambda) - 1.0) / lambda;
}

double box_cox_inverse(double v, double lambda) {
  if (v < 0.0) return v + 1.0;
  if (std::fabs(lambda) < kZeroLambda) return std::exp(v);
  const double base = lambda * v + 1.0;
  if (!(base > 0.0)) {
    throw Error(ErrorCode::NonInvertible, "non-invertible value " + std::to_string(v) +
                                              " for lambda " + std::to_string(lambda));
  }
  return std::pow(base, 1.0 / lambda);
}

double box_cox_log_likelihood(std::span<const double> positive, double lambda) {
  const double n = static_cast<double>(positive.size());
  double log_sum = 0.0;
  std::vector<double> v(positive.size());
  for (std::size_t i = 0; i < positive.size(); ++i) {
    const double w = positive[i];
    const double lw = std::log(w);
    log_sum += lw;
    v[i] = std::fabs(lambda) < kZeroLambda ? lw : std::expm1(lambda * lw) / lambda;
  }
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = ss / n;
  if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * log_sum;
}

double fit_box_cox_lambda(std::span<const double> positive) {
  if (positive.size() < 2) {
    throw Error(ErrorCode::Degenerate, "degenerate target: need at least 2 values");
  }
  for (double w : positive) {
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "Box-Cox needs positive values");
  }
  double best_lambda = 1.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = -kLambdaGridHalfSteps; k <= kLambdaGridHalfSteps; ++k) {
    const double lambda = grid_lambda(k);
    const double ll = box_cox_log_likelihood(positive, lambda);
    if (ll > best_ll) {
      best_ll = ll;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

TargetTransform fit_target_transform(std::span<const double> y_train) {
  const std::size_t n = y_train.size();
  if (n < 2) {
    throw Error(ErrorCode::Degenerate, "degenerate target: need at least 2 training values");
  }
  TargetTransform t;
  t.mean = std::accumulate(y_train.begin(), y_train.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double y : y_train) ss += (y - t.mean) * (y - t.mean);
  t.std = std::sqrt(ss / static_cast<double>(n));
  if (!(t.std > 0.0)) {
    throw Error(ErrorCode::Degenerate, "degenerate target: zero variance");
  }
  std::vector<double> w(n);
  double min_z = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = (y_train[i] - t.mean) / t.std;
    min_z = std::min(min_z, w[i]);
  }
  t.shift = 1.0 - min_z;
  for (double& x : w) x = std::max(x + t.shift, 1.0);
  t.lambda = fit_box_cox_lambda(w);
  return t;
}

std::vector<double> transform_target(const TargetTransform& t, std::span<const double> y,
                                     Direction direction) {
  std::vector<double> out(y.size());
  if (direction == Direction::Forward) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!std::isfinite(y[i])) {
        throw Error(ErrorCode::InvalidArgument, "non-finite target value");
      }
      out[i] = box_cox((y[i] - t.mean) / t.std + t.shift, t.lambda);
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) {
      out[i] = (box_cox_inverse(y[i], t.lambda) - t.shift) * t.std + t.mean;
    }
  }
  return out;
}

}  // namespace threshaug
