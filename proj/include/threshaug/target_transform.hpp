#pragma once

#include <span>
#include <vector>

namespace threshaug {

/// Centering-reduction followed by a shifted Box-Cox power transform, fitted
/// on training targets only.
///
/// Forward map: z = (y - mean) / std, w = z + shift, then
///   v = (w^lambda - 1) / lambda   (lambda != 0)
///   v = ln(w)                     (lambda == 0)
/// for w >= 1. Training values always land in w >= 1; below that the map
/// continues as v = w - 1, the tangent line at w = 1, so unseen targets under
/// the training minimum still transform monotonically.
struct TargetTransform {
  double mean = 0.0;
  double std = 1.0;
  double shift = 0.0;
  double lambda = 1.0;

  bool operator==(const TargetTransform&) const = default;
};

enum class Direction { Forward, Inverse };

/// Lambda search grid: [-2, 2] in steps of 0.01.
inline constexpr int kLambdaGridHalfSteps = 200;
inline constexpr double kLambdaGridStep = 0.01;

/// Profile log-likelihood of the Box-Cox model at `lambda`, for strictly
/// positive values: -(n/2) ln(sigma^2_lambda) + (lambda - 1) * sum ln(w).
double box_cox_log_likelihood(std::span<const double> positive, double lambda);

/// Grid argmax of box_cox_log_likelihood; ties go to the smaller lambda.
double fit_box_cox_lambda(std::span<const double> positive);

double box_cox(double w, double lambda);
double box_cox_inverse(double v, double lambda);

TargetTransform fit_target_transform(std::span<const double> y_train);

std::vector<double> transform_target(const TargetTransform& t, std::span<const double> y,
                                     Direction direction = Direction::Forward);

}  // namespace threshaug
