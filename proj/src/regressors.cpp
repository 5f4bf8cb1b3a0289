#include "threshaug/regressors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "threshaug/random.hpp"

namespace threshaug {

namespace {

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  return idx;
}

void check_fit_inputs(const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::Dimension, "feature rows and target length differ");
  }
  if (x.rows() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 training rows");
}

void check_params(RegressorKind kind, const RegressorParams& p) {
  if (p.min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_leaf must be at least 1");
  if (kind == RegressorKind::RandomForest && p.n_trees < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_trees must be at least 1");
  }
  if (kind == RegressorKind::Gbt) {
    if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "learning_rate must be in (0, 1]");
    }
    if (p.n_stages < 1) throw Error(ErrorCode::InvalidArgument, "n_stages must be at least 1");
  }
}

BoostedModel fit_boosted(const Matrix& x, std::span<const double> y, const RegressorParams& p,
                         std::vector<double>* sse_curve) {
  BoostedModel model;
  model.learning_rate = p.learning_rate;
  model.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> current(y.size(), model.base);
  std::vector<double> residual(y.size());
  const auto rows = all_rows(x.rows());
  const TreeParams tree_params{p.max_depth, p.min_leaf, 0};
  auto sse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - current[i]) * (y[i] - current[i]);
    return s;
  };
  if (sse_curve) sse_curve->push_back(sse());
  for (std::size_t m = 0; m < p.n_stages; ++m) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - current[i];
    auto tree = grow_regression_tree(x, residual, rows, tree_params, nullptr);
    for (std::size_t i = 0; i < y.size(); ++i) {
      current[i] += p.learning_rate * tree.predict(x.row(i));
    }
    model.stages.push_back(std::move(tree));
    if (sse_curve) sse_curve->push_back(sse());
  }
  return model;
}

}  // namespace

const char* to_string(RegressorKind kind) noexcept {
  switch (kind) {
    case RegressorKind::Linear: return "linear";
    case RegressorKind::Tree: return "tree";
    case RegressorKind::RandomForest: return "random_forest";
    case RegressorKind::Gbt: return "gbt";
  }
  return "unknown";
}

std::optional<RegressorKind> parse_regressor_kind(const std::string& text) {
  for (auto k : {RegressorKind::Linear, RegressorKind::Tree, RegressorKind::RandomForest,
                 RegressorKind::Gbt}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::size_t FeatureFraction::resolve(std::size_t d) const noexcept {
  std::size_t k = d;
  switch (rule) {
    case Rule::Sqrt: k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))); break;
    case Rule::Third: k = d / 3; break;
    case Rule::All: k = d; break;
    case Rule::Count: k = count; break;
  }
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
}

std::string FeatureFraction::to_string() const {
  switch (rule) {
    case Rule::Sqrt: return "sqrt";
    case Rule::Third: return "third";
    case Rule::All: return "all";
    case Rule::Count: return std::to_string(count);
  }
  return "all";
}

std::optional<FeatureFraction> FeatureFraction::parse(const std::string& text) {
  if (text == "sqrt") return FeatureFraction{Rule::Sqrt, 0};
  if (text == "third") return FeatureFraction{Rule::Third, 0};
  if (text == "all") return FeatureFraction{Rule::All, 0};
  std::size_t pos = 0;
  try {
    const long v = std::stol(text, &pos);
    if (pos == text.size() && v > 0) return FeatureFraction{Rule::Count, static_cast<std::size_t>(v)};
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

std::vector<RegressorParams> default_grid(RegressorKind kind) {
  std::vector<RegressorParams> grid;
  switch (kind) {
    case RegressorKind::Linear:
      break;
    case RegressorKind::Tree:
      for (int depth : {4, 8, 16, -1}) {
        for (std::size_t leaf : {1u, 5u, 20u}) {
          RegressorParams p;
          p.max_depth = depth;
          p.min_leaf = leaf;
          grid.push_back(p);
        }
      }
      break;
    case RegressorKind::RandomForest:
      for (int depth : {8, 16, -1}) {
        for (auto rule : {FeatureFraction::Rule::Sqrt, FeatureFraction::Rule::Third,
                          FeatureFraction::Rule::All}) {
          RegressorParams p;
          p.n_trees = 100;
          p.max_depth = depth;
          p.max_features = FeatureFraction{rule, 0};
          grid.push_back(p);
        }
      }
      break;
    case RegressorKind::Gbt:
      for (double eta : {0.05, 0.1, 0.3}) {
        for (std::size_t stages : {100u, 300u}) {
          for (int depth : {3, 6}) {
            RegressorParams p;
            p.learning_rate = eta;
            p.n_stages = stages;
            p.max_depth = depth;
            grid.push_back(p);
          }
        }
      }
      break;
  }
  return grid;
}

RegressorSpec default_spec(RegressorKind kind) {
  RegressorSpec spec;
  spec.kind = kind;
  spec.name = to_string(kind);
  spec.grid = default_grid(kind);
  if (!spec.grid.empty()) spec.params = spec.grid.front();
  return spec;
}

std::string describe_params(RegressorKind kind, const RegressorParams& p) {
  std::ostringstream out;
  auto depth = [&] { return p.max_depth < 0 ? std::string("unlimited") : std::to_string(p.max_depth); };
  switch (kind) {
    case RegressorKind::Linear:
      break;
    case RegressorKind::Tree:
      out << "max_depth=" << depth() << ";min_leaf=" << p.min_leaf;
      break;
    case RegressorKind::RandomForest:
      out << "n_trees=" << p.n_trees << ";max_depth=" << depth()
          << ";max_features=" << p.max_features.to_string();
      break;
    case RegressorKind::Gbt:
      out << "learning_rate=" << p.learning_rate << ";n_stages=" << p.n_stages
          << ";max_depth=" << depth();
      break;
  }
  return out.str();
}

LinearModel fit_linear(const Matrix& x, std::span<const double> y) {
  check_fit_inputs(x, y);
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> xm(
      x.data().data(), n, d);
  Eigen::Map<const Eigen::VectorXd> ym(y.data(), n);

  // Center so the intercept drops out of the least-squares problem.
  const Eigen::RowVectorXd x_mean = xm.colwise().mean();
  const double y_mean = ym.mean();
  const Eigen::MatrixXd xc = xm.rowwise() - x_mean;
  const Eigen::VectorXd yc = ym.array() - y_mean;

  LinearModel model;
  if (d > 0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
    const Eigen::VectorXd beta = cod.solve(yc);
    model.coefficients.assign(beta.data(), beta.data() + d);
    model.intercept = y_mean - x_mean.dot(beta);
  } else {
    model.intercept = y_mean;
  }
  return model;
}

RegressorModel fit_regressor(RegressorKind kind, const RegressorParams& params, const Matrix& x,
                             std::span<const double> y, std::uint64_t seed) {
  check_fit_inputs(x, y);
  check_params(kind, params);
  const std::size_t d = x.cols();
  switch (kind) {
    case RegressorKind::Linear:
      return RegressorModel(fit_linear(x, y), d);
    case RegressorKind::Tree: {
      const TreeParams tp{params.max_depth, params.min_leaf, 0};
      return RegressorModel(TreeModel{grow_regression_tree(x, y, all_rows(x.rows()), tp, nullptr)},
                            d);
    }
    case RegressorKind::RandomForest: {
      const TreeParams tp{params.max_depth, params.min_leaf, params.max_features.resolve(d)};
      ForestRegressorModel model;
      model.trees.reserve(params.n_trees);
      const std::size_t n = x.rows();
      std::vector<std::uint32_t> samples(n);
      for (std::size_t t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(seed, t));
        for (auto& s : samples) s = static_cast<std::uint32_t>(rng.index(n));
        model.trees.push_back(grow_regression_tree(x, y, samples, tp, &rng));
      }
      return RegressorModel(std::move(model), d);
    }
    case RegressorKind::Gbt:
      return RegressorModel(fit_boosted(x, y, params, nullptr), d);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown regressor kind");
}

std::vector<double> predict_regressor(const RegressorModel& m, const Matrix& x) {
  if (x.cols() != m.n_features()) {
    throw Error(ErrorCode::Dimension, "regressor expects " + std::to_string(m.n_features()) +
                                          " columns, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        for (std::size_t r = 0; r < x.rows(); ++r) {
          const auto row = x.row(r);
          if constexpr (std::is_same_v<T, LinearModel>) {
            double v = s.intercept;
            for (std::size_t c = 0; c < row.size(); ++c) v += s.coefficients[c] * row[c];
            out[r] = v;
          } else if constexpr (std::is_same_v<T, TreeModel>) {
            out[r] = s.tree.predict(row);
          } else if constexpr (std::is_same_v<T, ForestRegressorModel>) {
            double v = 0.0;
            for (const auto& t : s.trees) v += t.predict(row);
            out[r] = v / static_cast<double>(s.trees.size());
          } else {
            double v = s.base;
            for (const auto& t : s.stages) v += s.learning_rate * t.predict(row);
            out[r] = v;
          }
        }
      },
      m.state());
  return out;
}

std::vector<double> boosting_training_curve(const Matrix& x, std::span<const double> y,
                                            const RegressorParams& params) {
  check_fit_inputs(x, y);
  check_params(RegressorKind::Gbt, params);
  std::vector<double> curve;
  fit_boosted(x, y, params, &curve);
  return curve;
}

}  // namespace threshaug
