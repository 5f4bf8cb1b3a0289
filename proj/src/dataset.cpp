#include "threshaug/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace threshaug {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits one delimited record. Double quotes group a field and "" inside a
// quoted field is a literal quote.
bool split_record(const std::string& line, char delimiter, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return !quoted;
}

bool matches_any(const std::string& cell, const std::vector<std::regex>& patterns) {
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const std::regex& re) { return std::regex_match(cell, re); });
}

ColumnKind infer_kind(const std::vector<std::vector<std::string>>& rows, std::size_t col,
                      const std::vector<std::regex>& date_patterns) {
  std::set<std::string> distinct;
  bool numeric = true;
  bool date = true;
  for (const auto& row : rows) {
    const std::string& cell = row[col];
    distinct.insert(cell);
    double v;
    if (numeric && !parse_real(cell, v)) numeric = false;
    if (date && !(looks_like_iso_date(cell) || matches_any(cell, date_patterns))) date = false;
  }
  if (distinct.size() <= 1) return ColumnKind::Constant;
  if (numeric) return ColumnKind::Numeric;
  if (date) return ColumnKind::Date;
  if (distinct.size() == rows.size()) return ColumnKind::Identifier;
  return ColumnKind::Categorical;
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double pearson_abs(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::fabs(sab) / std::sqrt(saa * sbb);
}

}  // namespace

const char* to_string(ColumnKind kind) noexcept {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Date: return "date";
    case ColumnKind::Identifier: return "identifier";
    case ColumnKind::Constant: return "constant";
  }
  return "unknown";
}

std::optional<ColumnKind> parse_column_kind(const std::string& text) {
  for (auto k : {ColumnKind::Numeric, ColumnKind::Categorical, ColumnKind::Date,
                 ColumnKind::Identifier, ColumnKind::Constant}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

bool is_missing_token(const std::string& cell) noexcept {
  return cell.empty() || cell == "NA" || cell == "?";
}

bool parse_real(const std::string& cell, double& out) noexcept {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  if (first == last) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool looks_like_iso_date(const std::string& cell) {
  static const std::regex iso(
      R"(\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?)");
  return std::regex_match(cell, iso);
}

RawTable parse_table(const std::string& text, const std::string& target_name,
                     const LoadOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) {
    throw Error(ErrorCode::Dataset, "missing header row");
  }
  if (!split_record(line, options.delimiter, header)) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": unterminated quote");
  }

  RawTable table;
  const auto target_it = std::find(header.begin(), header.end(), target_name);
  if (target_it == header.end()) {
    throw Error(ErrorCode::Dataset, "target column '" + target_name + "' not found in header");
  }
  table.target_index = static_cast<std::size_t>(target_it - header.begin());

  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!split_record(line, options.delimiter, fields)) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": unterminated quote");
    }
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    }
    if (std::any_of(fields.begin(), fields.end(), is_missing_token)) {
      ++table.dropped_rows;
      continue;
    }
    table.rows.push_back(fields);
  }
  if (table.rows.empty()) {
    throw Error(ErrorCode::Dataset, "zero rows remaining after missing-value removal");
  }

  std::vector<std::regex> patterns;
  for (const auto& p : options.date_patterns) patterns.emplace_back(p);
  for (std::size_t c = 0; c < header.size(); ++c) {
    ColumnMeta meta{header[c], ColumnKind::Numeric, c};
    if (auto hint = options.hints.find(header[c]); hint != options.hints.end()) {
      meta.kind = hint->second;
    } else {
      meta.kind = infer_kind(table.rows, c, patterns);
    }
    table.columns.push_back(std::move(meta));
  }
  return table;
}

RawTable load_dataset(const std::string& path, const std::string& target_name,
                      const LoadOptions& options) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::Io, "cannot open dataset file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_table(buffer.str(), target_name, options);
}

Dataset preprocess_features(const RawTable& raw) {
  const std::size_t n = raw.row_count();
  if (n < 2) {
    throw Error(ErrorCode::Dataset, "need at least 2 rows, got " + std::to_string(n));
  }
  const auto& target_meta = raw.columns.at(raw.target_index);

  Dataset ds;
  ds.target_name = target_meta.name;
  ds.target.resize(n);
  const bool target_text_kind = target_meta.kind == ColumnKind::Categorical ||
                                target_meta.kind == ColumnKind::Identifier ||
                                target_meta.kind == ColumnKind::Date;
  for (std::size_t r = 0; r < n; ++r) {
    if (target_text_kind || !parse_real(raw.rows[r][raw.target_index], ds.target[r])) {
      throw Error(ErrorCode::Dataset, "target column '" + ds.target_name + "' is not numeric");
    }
  }

  struct Candidate {
    std::string name;
    std::string source;
    std::optional<std::string> category;
    std::vector<double> values;
  };
  std::vector<Candidate> candidates;
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    if (c == raw.target_index) continue;
    const auto& meta = raw.columns[c];
    if (meta.kind == ColumnKind::Numeric) {
      Candidate cand{meta.name, meta.name, std::nullopt, std::vector<double>(n)};
      for (std::size_t r = 0; r < n; ++r) {
        if (!parse_real(raw.rows[r][c], cand.values[r])) {
          throw Error(ErrorCode::Dataset, "column '" + meta.name + "' declared numeric but row " +
                                              std::to_string(r + 1) + " is '" + raw.rows[r][c] +
                                              "'");
        }
      }
      candidates.push_back(std::move(cand));
    } else if (meta.kind == ColumnKind::Categorical) {
      std::set<std::string> categories;
      for (const auto& row : raw.rows) categories.insert(row[c]);
      for (const auto& cat : categories) {
        Candidate cand{meta.name + "=" + cat, meta.name, cat, std::vector<double>(n)};
        for (std::size_t r = 0; r < n; ++r) cand.values[r] = raw.rows[r][c] == cat ? 1.0 : 0.0;
        candidates.push_back(std::move(cand));
      }
    }
  }

  // Only plain numeric columns are candidates for removal, so indicator
  // blocks always stay complete.
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool collinear = false;
    if (!candidates[i].category) {
      for (std::size_t j : kept) {
        if (pearson_abs(candidates[i].values, candidates[j].values) >= kCollinearityThreshold) {
          collinear = true;
          break;
        }
      }
    }
    if (!collinear) kept.push_back(i);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::Dataset, "all feature columns were dropped during preprocessing");
  }

  ds.features = Matrix(n, kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    auto& cand = candidates[kept[k]];
    for (std::size_t r = 0; r < n; ++r) ds.features(r, k) = cand.values[r];
    ds.feature_names.push_back(cand.name);
    ds.feature_source.push_back(cand.source);
    ds.feature_category.push_back(cand.category);
  }
  return ds;
}

RawTable to_raw_table(const Dataset& ds) {
  RawTable raw;
  raw.rows.assign(ds.n(), {});

  std::size_t f = 0;
  while (f < ds.d()) {
    const std::size_t col = raw.columns.size();
    if (!ds.feature_category[f]) {
      raw.columns.push_back({ds.feature_names[f], ColumnKind::Numeric, col});
      for (std::size_t r = 0; r < ds.n(); ++r) raw.rows[r].push_back(format_real(ds.features(r, f)));
      ++f;
      continue;
    }
    std::size_t end = f;
    while (end < ds.d() && ds.feature_category[end] &&
           ds.feature_source[end] == ds.feature_source[f]) {
      ++end;
    }
    raw.columns.push_back({ds.feature_source[f], ColumnKind::Categorical, col});
    for (std::size_t r = 0; r < ds.n(); ++r) {
      std::string cell;
      for (std::size_t j = f; j < end; ++j) {
        if (ds.features(r, j) == 1.0) cell = *ds.feature_category[j];
      }
      raw.rows[r].push_back(cell);
    }
    f = end;
  }
  raw.target_index = raw.columns.size();
  raw.columns.push_back({ds.target_name, ColumnKind::Numeric, raw.target_index});
  for (std::size_t r = 0; r < ds.n(); ++r) raw.rows[r].push_back(format_real(ds.target[r]));
  return raw;
}

}  // namespace threshaug
