#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threshaug/matrix.hpp"

namespace threshaug {

enum class ColumnKind { Numeric, Categorical, Date, Identifier, Constant };

const char* to_string(ColumnKind kind) noexcept;
std::optional<ColumnKind> parse_column_kind(const std::string& text);

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::size_t original_index = 0;
};

struct LoadOptions {
  char delimiter = ',';
  /// Per-column overrides of the inferred kind.
  std::map<std::string, ColumnKind> hints;
  /// Extra regular expressions recognised as dates, on top of ISO-8601.
  std::vector<std::string> date_patterns;
};

/// Parsed text cells after missing-row removal, with one ColumnMeta per column.
struct RawTable {
  std::vector<ColumnMeta> columns;
  std::vector<std::vector<std::string>> rows;
  std::size_t target_index = 0;
  std::size_t dropped_rows = 0;

  std::size_t row_count() const noexcept { return rows.size(); }
};

/// Numeric design matrix ready for modelling. `feature_source` names the raw
/// column each feature came from; `feature_category` is set for indicator
/// columns produced by one-hot coding.
struct Dataset {
  Matrix features;
  std::vector<double> target;
  std::vector<std::string> feature_names;
  std::vector<std::string> feature_source;
  std::vector<std::optional<std::string>> feature_category;
  std::string target_name;

  std::size_t n() const noexcept { return features.rows(); }
  std::size_t d() const noexcept { return features.cols(); }
};

/// Absolute Pearson correlation at or above this marks a later column as
/// collinear with an earlier one.
inline constexpr double kCollinearityThreshold = 0.999;

bool is_missing_token(const std::string& cell) noexcept;
bool parse_real(const std::string& cell, double& out) noexcept;
bool looks_like_iso_date(const std::string& cell);

RawTable parse_table(const std::string& text, const std::string& target_name,
                     const LoadOptions& options = {});
RawTable load_dataset(const std::string& path, const std::string& target_name,
                      const LoadOptions& options = {});

Dataset preprocess_features(const RawTable& raw);

/// Rebuilds a RawTable from a Dataset: indicator blocks are folded back into a
/// categorical column, every other feature becomes a numeric column.
RawTable to_raw_table(const Dataset& ds);

}  // namespace threshaug
