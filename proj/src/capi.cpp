#include "threshaug/threshaug.h"

#include <cstring>
#include <mutex>
#include <new>
#include <string>
#include <vector>

#include "threshaug/augment.hpp"
#include "threshaug/config.hpp"
#include "threshaug/dataset.hpp"
#include "threshaug/error.hpp"
#include "threshaug/harness.hpp"
#include "threshaug/report.hpp"
#include "threshaug/target_transform.hpp"

struct threshaug_config {
  threshaug::ExperimentConfig cfg;
};
struct threshaug_result {
  threshaug::ExperimentResult result;
};
struct threshaug_dataset {
  threshaug::Dataset ds;
  std::size_t dropped = 0;
};
struct threshaug_augmenter {
  threshaug::Augmenter aug;
};

namespace {

thread_local std::string g_last_error;

threshaug_status to_status(threshaug::ErrorCode code) {
  using threshaug::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return THRESHAUG_ERR_INVALID_ARGUMENT;
    case ErrorCode::Dimension: return THRESHAUG_ERR_DIMENSION;
    case ErrorCode::Io: return THRESHAUG_ERR_IO;
    case ErrorCode::Parse: return THRESHAUG_ERR_PARSE;
    case ErrorCode::Dataset: return THRESHAUG_ERR_DATASET;
    case ErrorCode::Degenerate: return THRESHAUG_ERR_DEGENERATE;
    case ErrorCode::NonInvertible: return THRESHAUG_ERR_NON_INVERTIBLE;
    case ErrorCode::Config: return THRESHAUG_ERR_CONFIG;
    case ErrorCode::NotFound: return THRESHAUG_ERR_NOT_FOUND;
    case ErrorCode::Runtime: return THRESHAUG_ERR_RUNTIME;
  }
  return THRESHAUG_ERR_RUNTIME;
}

threshaug_status fail(threshaug_status status, std::string msg) {
  g_last_error = std::move(msg);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
threshaug_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return THRESHAUG_OK;
  } catch (const threshaug::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(THRESHAUG_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(THRESHAUG_ERR_RUNTIME, e.what());
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw threshaug::Error(threshaug::ErrorCode::InvalidArgument, what);
}

threshaug_status copy_string(const std::string& s, char* buf, std::size_t size, std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || size < s.size() + 1) return fail(THRESHAUG_ERR_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  g_last_error.clear();
  return THRESHAUG_OK;
}

threshaug::Matrix matrix_from(const double* x, std::size_t n, std::size_t d) {
  require(x != nullptr || n * d == 0, "null matrix pointer");
  return threshaug::Matrix(n, d, std::vector<double>(x, x + n * d));
}

}  // namespace

extern "C" {

const char* threshaug_last_error(void) { return g_last_error.c_str(); }

const char* threshaug_status_name(threshaug_status status) {
  switch (status) {
    case THRESHAUG_OK: return "ok";
    case THRESHAUG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case THRESHAUG_ERR_DIMENSION: return "dimension mismatch";
    case THRESHAUG_ERR_IO: return "i/o error";
    case THRESHAUG_ERR_PARSE: return "parse error";
    case THRESHAUG_ERR_DATASET: return "dataset error";
    case THRESHAUG_ERR_DEGENERATE: return "degenerate input";
    case THRESHAUG_ERR_NON_INVERTIBLE: return "not invertible";
    case THRESHAUG_ERR_CONFIG: return "config error";
    case THRESHAUG_ERR_NOT_FOUND: return "not found";
    case THRESHAUG_ERR_RUNTIME: return "runtime error";
    case THRESHAUG_ERR_BUFFER_TOO_SMALL: return "buffer too small";
  }
  return "unknown status";
}

const char* threshaug_version(void) { return "0.1.0"; }

threshaug_status threshaug_config_load(const char* path, threshaug_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new threshaug_config{threshaug::load_config(path)};
  });
}

threshaug_status threshaug_config_parse(const char* json_text, const char* base_dir, threshaug_config** out) {
  return guarded([&] {
    require(json_text && out, "null argument");
    *out = new threshaug_config{threshaug::parse_config(json_text, base_dir ? base_dir : "")};
  });
}

void threshaug_config_free(threshaug_config* cfg) { delete cfg; }

threshaug_status threshaug_config_set_seed(threshaug_config* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "null config");
    cfg->cfg.seed = seed;
  });
}

threshaug_status threshaug_config_set_jobs(threshaug_config* cfg, unsigned jobs) {
  return guarded([&] {
    require(cfg, "null config");
    require(jobs >= 1, "jobs must be at least 1");
    cfg->cfg.jobs = jobs;
  });
}

threshaug_status threshaug_config_set_output_dir(threshaug_config* cfg, const char* dir) {
  return guarded([&] {
    require(cfg && dir, "null argument");
    cfg->cfg.output_dir = dir;
  });
}

threshaug_status threshaug_config_set_s_values(threshaug_config* cfg, const size_t* s, size_t count) {
  return guarded([&] {
    require(cfg && (s || count == 0), "null argument");
    auto copy = cfg->cfg;
    copy.s_values.assign(s, s + count);
    threshaug::validate_config(copy);
    cfg->cfg = std::move(copy);
  });
}

threshaug_status threshaug_config_output_dir(const threshaug_config* cfg, char* buf, size_t size, size_t* needed) {
  if (!cfg) return fail(THRESHAUG_ERR_INVALID_ARGUMENT, "null config");
  return copy_string(cfg->cfg.output_dir, buf, size, needed);
}

threshaug_status threshaug_run(const threshaug_config* cfg, threshaug_log_fn log, void* user,
                               threshaug_result** out) {
  return guarded([&] {
    require(cfg && out, "null argument");
    std::mutex mu;
    threshaug::LogFn fn;
    if (log) {
      fn = [&](const std::string& line) {
        std::lock_guard lock(mu);
        log(line.c_str(), user);
      };
    }
    *out = new threshaug_result{threshaug::run_experiment(cfg->cfg, fn)};
  });
}

threshaug_status threshaug_result_load(const char* records_path, threshaug_result** out) {
  return guarded([&] {
    require(records_path && out, "null argument");
    *out = new threshaug_result{threshaug::read_records_file(records_path)};
  });
}

threshaug_status threshaug_result_merge(const threshaug_result* const* parts, size_t count, threshaug_result** out) {
  return guarded([&] {
    require((parts || count == 0) && out, "null argument");
    std::vector<threshaug::ExperimentResult> all;
    for (std::size_t i = 0; i < count; ++i) {
      require(parts[i], "null result");
      all.push_back(parts[i]->result);
    }
    *out = new threshaug_result{threshaug::merge_results(all)};
  });
}

void threshaug_result_free(threshaug_result* r) { delete r; }

size_t threshaug_result_count(const threshaug_result* r) { return r ? r->result.records.size() : 0; }

size_t threshaug_result_error_count(const threshaug_result* r) {
  if (!r) return 0;
  std::size_t n = 0;
  for (const auto& rec : r->result.records) n += rec.ok() ? 0 : 1;
  return n;
}

threshaug_status threshaug_result_write_records(const threshaug_result* r, const char* path) {
  return guarded([&] {
    require(r && path, "null argument");
    threshaug::write_records_file(path, r->result);
  });
}

threshaug_status threshaug_result_write_timings(const threshaug_result* r, const char* path) {
  return guarded([&] {
    require(r && path, "null argument");
    threshaug::write_timings_file(path, r->result);
  });
}

threshaug_status threshaug_report_summary(const threshaug_result* r, size_t s, const char* path) {
  return guarded([&] {
    require(r && path, "null argument");
    threshaug::write_summary_file(path, r->result, s);
  });
}

threshaug_status threshaug_report_s_curve(const threshaug_result* r, const char* regressor, const char* dataset,
                                          const char* path) {
  return guarded([&] {
    require(r && regressor && dataset && path, "null argument");
    threshaug::write_s_curve_file(path, r->result, regressor, dataset);
  });
}

threshaug_status threshaug_report_critical_diagram(const threshaug_result* r, size_t s, const char* path) {
  return guarded([&] {
    require(r && path, "null argument");
    threshaug::write_critical_diagram_file(path, r->result, s);
  });
}

threshaug_status threshaug_report_default(const threshaug_result* r, const char* dir, size_t* count) {
  return guarded([&] {
    require(r && dir, "null argument");
    const auto written = threshaug::write_default_reports(dir, r->result);
    if (count) *count = written.size();
  });
}

threshaug_status threshaug_report_summary_name(size_t s, char* buf, size_t size, size_t* needed) {
  return copy_string(threshaug::summary_file_name(s), buf, size, needed);
}

threshaug_status threshaug_report_s_curve_name(const char* regressor, const char* dataset, char* buf, size_t size,
                                               size_t* needed) {
  if (!regressor || !dataset) return fail(THRESHAUG_ERR_INVALID_ARGUMENT, "null argument");
  return copy_string(threshaug::s_curve_file_name(regressor, dataset), buf, size, needed);
}

threshaug_status threshaug_result_max_s(const threshaug_result* r, size_t* s) {
  return guarded([&] {
    require(r && s, "null argument");
    const auto all = threshaug::s_values(r->result);
    if (all.empty()) throw threshaug::Error(threshaug::ErrorCode::NotFound, "result has no augmented records");
    *s = all.back();
  });
}

size_t threshaug_result_dataset_count(const threshaug_result* r) {
  return r ? threshaug::dataset_names(r->result).size() : 0;
}

size_t threshaug_result_regressor_count(const threshaug_result* r) {
  return r ? threshaug::regressor_names(r->result).size() : 0;
}

threshaug_status threshaug_result_dataset_name(const threshaug_result* r, size_t i, char* buf, size_t size,
                                               size_t* needed) {
  if (!r) return fail(THRESHAUG_ERR_INVALID_ARGUMENT, "null result");
  const auto names = threshaug::dataset_names(r->result);
  if (i >= names.size()) return fail(THRESHAUG_ERR_NOT_FOUND, "dataset index out of range");
  return copy_string(names[i], buf, size, needed);
}

threshaug_status threshaug_result_regressor_name(const threshaug_result* r, size_t i, char* buf, size_t size,
                                                 size_t* needed) {
  if (!r) return fail(THRESHAUG_ERR_INVALID_ARGUMENT, "null result");
  const auto names = threshaug::regressor_names(r->result);
  if (i >= names.size()) return fail(THRESHAUG_ERR_NOT_FOUND, "regressor index out of range");
  return copy_string(names[i], buf, size, needed);
}

threshaug_status threshaug_dataset_load(const char* path, const char* target, char delimiter,
                                        threshaug_dataset** out) {
  return guarded([&] {
    require(path && target && out, "null argument");
    threshaug::LoadOptions opts;
    if (delimiter != 0) opts.delimiter = delimiter;
    const auto raw = threshaug::load_dataset(path, target, opts);
    *out = new threshaug_dataset{threshaug::preprocess_features(raw), raw.dropped_rows};
  });
}

void threshaug_dataset_free(threshaug_dataset* ds) { delete ds; }

size_t threshaug_dataset_rows(const threshaug_dataset* ds) { return ds ? ds->ds.n() : 0; }
size_t threshaug_dataset_features(const threshaug_dataset* ds) { return ds ? ds->ds.d() : 0; }
size_t threshaug_dataset_dropped_rows(const threshaug_dataset* ds) { return ds ? ds->dropped : 0; }

threshaug_status threshaug_dataset_feature_name(const threshaug_dataset* ds, size_t j, char* buf, size_t size,
                                                size_t* needed) {
  if (!ds) return fail(THRESHAUG_ERR_INVALID_ARGUMENT, "null dataset");
  if (j >= ds->ds.d()) return fail(THRESHAUG_ERR_NOT_FOUND, "feature index out of range");
  return copy_string(ds->ds.feature_names[j], buf, size, needed);
}

threshaug_status threshaug_dataset_copy_features(const threshaug_dataset* ds, double* out, size_t count) {
  return guarded([&] {
    require(ds && out, "null argument");
    const auto& m = ds->ds.features;
    if (count != m.rows() * m.cols()) throw threshaug::Error(threshaug::ErrorCode::Dimension, "wrong output size");
    std::memcpy(out, m.data().data(), count * sizeof(double));
  });
}

threshaug_status threshaug_dataset_copy_target(const threshaug_dataset* ds, double* out, size_t count) {
  return guarded([&] {
    require(ds && out, "null argument");
    if (count != ds->ds.target.size()) throw threshaug::Error(threshaug::ErrorCode::Dimension, "wrong output size");
    std::memcpy(out, ds->ds.target.data(), count * sizeof(double));
  });
}

threshaug_forest_params threshaug_forest_params_default(void) {
  const threshaug::ForestParams p;
  return threshaug_forest_params{p.n_trees, p.max_depth, p.min_leaf, p.jobs};
}

threshaug_status threshaug_augmenter_fit(const double* x, size_t n, size_t d, const double* y, size_t s,
                                         const threshaug_forest_params* params, uint64_t seed,
                                         threshaug_augmenter** out) {
  return guarded([&] {
    require(y && out, "null argument");
    const auto xm = matrix_from(x, n, d);
    threshaug::ForestParams fp;
    if (params) {
      fp.n_trees = params->n_trees;
      fp.max_depth = params->max_depth;
      fp.min_leaf = params->min_leaf;
      fp.jobs = params->jobs;
    }
    *out = new threshaug_augmenter{
        threshaug::fit_augmenter(xm, std::span<const double>(y, n), s, fp, seed, params ? params->jobs : 1)};
  });
}

void threshaug_augmenter_free(threshaug_augmenter* a) { delete a; }

size_t threshaug_augmenter_effective_s(const threshaug_augmenter* a) { return a ? a->aug.effective_s() : 0; }

threshaug_status threshaug_augmenter_thresholds(const threshaug_augmenter* a, double* out, size_t count) {
  return guarded([&] {
    require(a && out, "null argument");
    const auto& t = a->aug.thresholds().thresholds;
    if (count != t.size()) throw threshaug::Error(threshaug::ErrorCode::Dimension, "wrong output size");
    std::memcpy(out, t.data(), count * sizeof(double));
  });
}

threshaug_status threshaug_augmenter_transform(const threshaug_augmenter* a, const double* x, size_t n, size_t d,
                                               double* out, size_t count) {
  return guarded([&] {
    require(a && out, "null argument");
    const auto xp = threshaug::constructed_features(a->aug, matrix_from(x, n, d));
    if (count != xp.rows() * xp.cols()) throw threshaug::Error(threshaug::ErrorCode::Dimension, "wrong output size");
    std::memcpy(out, xp.data().data(), count * sizeof(double));
  });
}

threshaug_status threshaug_target_transform_fit(const double* y, size_t n, threshaug_target_transform* out) {
  return guarded([&] {
    require(y && out, "null argument");
    const auto t = threshaug::fit_target_transform(std::span<const double>(y, n));
    *out = threshaug_target_transform{t.mean, t.std, t.shift, t.lambda};
  });
}

threshaug_status threshaug_target_transform_apply(const threshaug_target_transform* t, const double* y, size_t n,
                                                  int inverse, double* out) {
  return guarded([&] {
    require(t && (y || n == 0) && (out || n == 0), "null argument");
    const threshaug::TargetTransform tt{t->mean, t->std, t->shift, t->lambda};
    const auto v = threshaug::transform_target(tt, std::span<const double>(y, n),
                                               inverse ? threshaug::Direction::Inverse : threshaug::Direction::Forward);
    std::copy(v.begin(), v.end(), out);
  });
}

}  // extern "C"
