#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "threshaug/harness.hpp"
#include "threshaug/stats.hpp"

namespace threshaug {

// ---------------------------------------------------------------------------
// Records file: one JSON object per line, fields in this order:
//   dataset, fold, regressor, kind, variant ("native" | "augmented"),
//   s (null for native), effective_s (null for native), train_rmse,
//   test_rmse (null when the cell failed), params, error (null on success).
// Wall times are kept out of this file so reruns compare byte for byte; they
// go to a separate timings file.
// ---------------------------------------------------------------------------

void write_records(std::ostream& out, const ExperimentResult& r);
void write_records_file(const std::string& path, const ExperimentResult& r);
ExperimentResult read_records(std::istream& in);
ExperimentResult read_records_file(const std::string& path);

/// Concatenates runs in argument order. Two records for the same
/// (dataset, fold, regressor, s) are an error.
ExperimentResult merge_results(const std::vector<ExperimentResult>& parts);

/// Tab-separated dataset, fold, regressor, variant, s, wall_time_s.
void write_timings_file(const std::string& path, const ExperimentResult& r);

std::vector<std::string> dataset_names(const ExperimentResult& r);
std::vector<std::string> regressor_names(const ExperimentResult& r);
std::vector<std::size_t> s_values(const ExperimentResult& r);

struct SummaryCell {
  std::string regressor;
  std::size_t folds = 0;  // paired folds used
  ComparisonCell comparison;
};

struct SummaryRow {
  std::string dataset;
  std::vector<SummaryCell> cells;  // one per regressor, in regressor order
};

struct SummaryTable {
  std::size_t s = 0;
  std::vector<std::string> regressors;
  std::vector<SummaryRow> rows;
  std::vector<double> native_mean;  // footer: mean over datasets, per regressor
  std::vector<double> aug_mean;
  std::vector<WinTieLoss> tally;
};

/// Fold-mean native and augmented test RMSE per (dataset, regressor) at `s`,
/// with the paired t-test outcome. Folds where either side failed are left out.
SummaryTable build_summary_table(const ExperimentResult& r, std::size_t s);

/// CSV: dataset, then per regressor <name>_native, <name>_aug, <name>_p,
/// <name>_outcome; footer rows "mean" and "loss/tie/win".
void write_summary_csv(std::ostream& out, const SummaryTable& t);

struct SCurvePoint {
  std::size_t s = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double native_train_rmse = 0.0;
  double native_test_rmse = 0.0;
};

std::vector<SCurvePoint> build_s_curve(const ExperimentResult& r, const std::string& regressor,
                                       const std::string& dataset);

/// TSV columns: s, train_rmse, test_rmse, native_train_rmse, native_test_rmse.
void write_s_curve_tsv(std::ostream& out, const std::vector<SCurvePoint>& curve);

struct CriticalDiagram {
  std::vector<std::string> variants;  // sorted by mean rank, best first
  std::vector<double> mean_ranks;
  double cd = 0.0;
  std::size_t n_datasets = 0;
  double friedman_chi2 = 0.0;
  double iman_davenport_f = 0.0;
  /// Maximal runs [first, last] of consecutive variants (positions in the
  /// sorted order) whose mean-rank span is below cd.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
};

CriticalDiagram build_critical_diagram(const RankSummary& rank,
                                       const std::vector<std::string>& variant_names);

/// Datasets x variants table of fold-mean test RMSE at `s`. Variants are
/// "<regressor>" (native) and "<regressor>+" (augmented).
struct VariantTable {
  std::vector<std::string> datasets;
  std::vector<std::string> variants;
  Matrix rmse;
};
VariantTable build_variant_table(const ExperimentResult& r, std::size_t s);

/// Header comment lines (# cd, # n_datasets, # friedman_chi2,
/// # iman_davenport_f) then TSV: variant, mean_rank, groups (comma-separated
/// group ids the variant belongs to).
void write_critical_diagram_tsv(std::ostream& out, const CriticalDiagram& cd);

std::string summary_file_name(std::size_t s);
std::string s_curve_file_name(const std::string& regressor, const std::string& dataset);
inline constexpr const char* kCriticalDiagramFile = "critical_diagram.tsv";
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kTimingsFile = "timings.tsv";

void write_summary_file(const std::string& path, const ExperimentResult& r, std::size_t s);
void write_s_curve_file(const std::string& path, const ExperimentResult& r,
                        const std::string& regressor, const std::string& dataset);
void write_critical_diagram_file(const std::string& path, const ExperimentResult& r, std::size_t s);

/// Writes records, timings, the summary at the largest s, every S-curve and,
/// with two or more datasets, the critical diagram. Returns the paths written.
std::vector<std::string> write_default_reports(const std::string& dir, const ExperimentResult& r);

}  // namespace threshaug
