#include "threshaug/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "threshaug/parallel.hpp"
#include "threshaug/random.hpp"
#include "threshaug/stats.hpp"

namespace threshaug {

namespace {

// Stream tags for derive_seed, so each consumer of the root seed draws
// from its own sequence.
constexpr std::uint64_t kFoldStream = 1;
constexpr std::uint64_t kTuningStream = 2;
constexpr std::uint64_t kAugmenterStream = 3;
constexpr std::uint64_t kRegressorStream = 4;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (n < k) {
    throw Error(ErrorCode::InvalidArgument, "cannot split " + std::to_string(n) + " rows into " +
                                                std::to_string(k) + " folds");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);

  std::vector<FoldSplit> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    auto& fold = folds[f];
    fold.fold_index = f;
    fold.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                             perm.begin() + static_cast<std::ptrdiff_t>(start + size));
    std::sort(fold.test_indices.begin(), fold.test_indices.end());
    start += size;
  }
  for (auto& fold : folds) {
    std::vector<bool> in_test(n, false);
    for (auto i : fold.test_indices) in_test[i] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_test[i]) fold.train_indices.push_back(i);
    }
  }
  return folds;
}

TuningSplit tuning_split(std::size_t n, double validation_fraction, std::uint64_t seed) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "validation fraction must be in (0, 1)");
  }
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  if (n_val < 1 || n - n_val < 2) {
    throw Error(ErrorCode::InvalidArgument, "training fold too small for a tuning split");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);
  TuningSplit split;
  split.validation.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.fit.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.fit.begin(), split.fit.end());
  return split;
}

FeatureScaler fit_feature_scaler(const Matrix& x_train) {
  if (x_train.rows() == 0) throw Error(ErrorCode::InvalidArgument, "cannot scale zero rows");
  FeatureScaler s;
  const std::size_t d = x_train.cols();
  const double n = static_cast<double>(x_train.rows());
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < x_train.rows(); ++r) m += x_train(r, c);
    m /= n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x_train.rows(); ++r) {
      ss += (x_train(r, c) - m) * (x_train(r, c) - m);
    }
    const double sd = std::sqrt(ss / n);
    s.mean[c] = m;
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix FeatureScaler::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw Error(ErrorCode::Dimension, "scaler column count mismatch");
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
  }
  return out;
}

RegressorParams grid_search(const RegressorSpec& spec, const Matrix& x_fit,
                            std::span<const double> y_fit, const Matrix& x_val,
                            std::span<const double> y_val, std::uint64_t seed) {
  if (!spec.tunable()) return spec.params;
  if (spec.grid.empty()) {
    throw Error(ErrorCode::Config, "regressor '" + spec.name + "' needs a non-empty grid");
  }
  std::size_t best = 0;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    const auto model = fit_regressor(spec.kind, spec.grid[g], x_fit, y_fit, seed);
    const double score = rmse(y_val, predict_regressor(model, x_val));
    if (score < best_rmse) {
      best_rmse = score;
      best = g;
    }
  }
  return spec.grid[best];
}

void validate_config(const ExperimentConfig& config) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::Config, msg); };
  if (config.datasets.empty()) fail("config names no dataset");
  std::set<std::string> names;
  for (const auto& ds : config.datasets) {
    if (ds.path.empty()) fail("dataset path is empty");
    if (ds.target.empty()) fail("dataset target is empty");
    if (!names.insert(ds.name).second) fail("duplicate dataset name '" + ds.name + "'");
  }
  if (config.s_values.empty()) fail("experiment.s_values must not be empty");
  for (std::size_t i = 0; i < config.s_values.size(); ++i) {
    if (config.s_values[i] < 1) fail("experiment.s_values entries must be >= 1");
    if (i > 0 && config.s_values[i] <= config.s_values[i - 1]) {
      fail("experiment.s_values must be strictly ascending");
    }
  }
  if (config.k < 2) fail("experiment.k must be at least 2");
  if (config.regressors.empty()) fail("config lists no regressor");
  std::set<std::string> reg_names;
  for (const auto& r : config.regressors) {
    if (r.tunable() && r.grid.empty()) fail("regressor '" + r.name + "' needs a non-empty grid");
    if (!reg_names.insert(r.name).second) fail("duplicate regressor name '" + r.name + "'");
  }
  if (!(config.tuning_fraction > 0.0 && config.tuning_fraction < 1.0)) {
    fail("experiment.tuning_fraction must be in (0, 1)");
  }
  if (config.forest.n_trees < 1) fail("augmenter.n_trees must be at least 1");
}

FoldState fit_fold_state(const Dataset& ds, const FoldSplit& split,
                         std::span<const std::size_t> s_values, const ForestParams& forest,
                         std::uint64_t seed) {
  FoldState st;
  const Matrix x_train_raw = ds.features.select_rows(split.train_indices);
  const Matrix x_test_raw = ds.features.select_rows(split.test_indices);
  const auto y_train_raw = select(ds.target, split.train_indices);
  const auto y_test_raw = select(ds.target, split.test_indices);

  st.scaler = fit_feature_scaler(x_train_raw);
  st.x_train = st.scaler.apply(x_train_raw);
  st.x_test = st.scaler.apply(x_test_raw);
  st.target = fit_target_transform(y_train_raw);
  st.y_train = transform_target(st.target, y_train_raw);
  st.y_test = transform_target(st.target, y_test_raw);

  for (std::size_t i = 0; i < s_values.size(); ++i) {
    try {
      st.augmenters.emplace_back(fit_augmenter(st.x_train, st.y_train, s_values[i], forest,
                                               derive_seed(seed, kAugmenterStream, s_values[i])));
      st.augmenter_errors.emplace_back();
    } catch (const std::exception& e) {
      st.augmenters.emplace_back(std::nullopt);
      st.augmenter_errors.emplace_back(e.what());
    }
  }
  return st;
}

namespace {

struct Unit {
  std::size_t dataset;
  std::size_t fold;
};

std::vector<ExperimentRecord> run_fold(const ExperimentConfig& config, const DatasetConfig& dcfg,
                                       const Dataset& ds, const FoldSplit& split,
                                       const LogFn& log) {
  const std::uint64_t fold_seed = derive_seed(config.seed, split.fold_index);
  std::vector<ExperimentRecord> out;

  auto error_records = [&](const RegressorSpec& spec, std::optional<std::size_t> only_s,
                           bool include_native, const std::string& msg) {
    auto rec = [&](std::optional<std::size_t> s) {
      ExperimentRecord r;
      r.dataset = dcfg.name;
      r.fold = split.fold_index;
      r.regressor = spec.name;
      r.kind = spec.kind;
      r.s = s;
      r.error = msg;
      r.train_rmse = r.test_rmse = std::numeric_limits<double>::quiet_NaN();
      out.push_back(std::move(r));
    };
    if (include_native) rec(std::nullopt);
    for (auto s : config.s_values) {
      if (!only_s || *only_s == s) rec(s);
    }
  };

  FoldState st;
  try {
    st = fit_fold_state(ds, split, config.s_values, config.forest, fold_seed);
  } catch (const std::exception& e) {
    for (const auto& spec : config.regressors) error_records(spec, std::nullopt, true, e.what());
    return out;
  }

  const auto tune = tuning_split(st.x_train.rows(), config.tuning_fraction,
                                 derive_seed(fold_seed, kTuningStream));
  const auto y_fit = select(st.y_train, tune.fit);
  const auto y_val = select(st.y_train, tune.validation);

  // Variant 0 is native; variant i > 0 uses augmenter i - 1.
  const std::size_t n_variants = 1 + config.s_values.size();
  struct VariantData {
    Matrix fit, val, test;
    bool ok = true;
  };
  std::vector<VariantData> variants(n_variants);
  for (std::size_t v = 0; v < n_variants; ++v) {
    Matrix train = st.x_train;
    Matrix test = st.x_test;
    if (v > 0) {
      const auto& aug = st.augmenters[v - 1];
      if (!aug) {
        variants[v].ok = false;
        continue;
      }
      train = augment_features(*aug, st.x_train);
      test = augment_features(*aug, st.x_test);
    }
    variants[v].fit = train.select_rows(tune.fit);
    variants[v].val = train.select_rows(tune.validation);
    variants[v].test = std::move(test);
  }

  for (std::size_t r = 0; r < config.regressors.size(); ++r) {
    const auto& spec = config.regressors[r];
    const std::uint64_t reg_seed = derive_seed(fold_seed, kRegressorStream, r);
    for (std::size_t v = 0; v < n_variants; ++v) {
      const std::optional<std::size_t> s =
          v == 0 ? std::nullopt : std::optional<std::size_t>(config.s_values[v - 1]);
      if (!variants[v].ok) {
        error_records(spec, s, false, "augmenter fit failed: " + st.augmenter_errors[v - 1]);
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      ExperimentRecord rec;
      rec.dataset = dcfg.name;
      rec.fold = split.fold_index;
      rec.regressor = spec.name;
      rec.kind = spec.kind;
      rec.s = s;
      if (v > 0) rec.effective_s = st.augmenters[v - 1]->effective_s();
      try {
        const auto& data = variants[v];
        const auto params = grid_search(spec, data.fit, y_fit, data.val, y_val, reg_seed);
        const auto model = fit_regressor(spec.kind, params, data.fit, y_fit, reg_seed);
        rec.train_rmse = rmse(y_fit, predict_regressor(model, data.fit));
        rec.test_rmse = rmse(st.y_test, predict_regressor(model, data.test));
        rec.params = describe_params(spec.kind, params);
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.train_rmse = rec.test_rmse = std::numeric_limits<double>::quiet_NaN();
      }
      rec.wall_time_s = seconds_since(start);
      out.push_back(std::move(rec));
    }
  }
  if (log) {
    log("dataset " + dcfg.name + " fold " + std::to_string(split.fold_index + 1) + "/" +
        std::to_string(config.k) + " done");
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const LogFn& log) {
  validate_config(config);

  std::vector<Dataset> datasets;
  std::vector<std::vector<FoldSplit>> splits;
  for (const auto& dcfg : config.datasets) {
    const RawTable raw = load_dataset(dcfg.path, dcfg.target, dcfg.load);
    datasets.push_back(preprocess_features(raw));
    const auto& ds = datasets.back();
    if (log) {
      log("dataset " + dcfg.name + ": " + std::to_string(ds.n()) + " rows, " +
          std::to_string(ds.d()) + " features, " + std::to_string(raw.dropped_rows) +
          " rows dropped for missing values");
    }
    splits.push_back(kfold_split(ds.n(), config.k, derive_seed(config.seed, kFoldStream)));
  }

  std::vector<Unit> units;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t f = 0; f < config.k; ++f) units.push_back({d, f});
  }
  std::vector<std::vector<ExperimentRecord>> per_unit(units.size());
  parallel_for(units.size(), config.jobs, [&](std::size_t u) {
    const auto [d, f] = units[u];
    per_unit[u] = run_fold(config, config.datasets[d], datasets[d], splits[d][f], log);
  });

  ExperimentResult result;
  for (auto& recs : per_unit) {
    for (auto& r : recs) result.records.push_back(std::move(r));
  }
  return result;
}

}  // namespace threshaug
