#include "threshaug/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "threshaug/error.hpp"

namespace threshaug {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ordered_json real_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

// Ordered unique values in first-appearance order.
template <typename F>
std::vector<std::string> unique_in_order(const ExperimentResult& r, F key) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& rec : r.records) {
    if (seen.insert(key(rec)).second) out.push_back(key(rec));
  }
  return out;
}

// Per-fold test (or train) RMSE of one variant, keyed by fold. Failed cells are skipped.
std::map<std::size_t, const ExperimentRecord*> fold_records(const ExperimentResult& r,
                                                            const std::string& dataset,
                                                            const std::string& regressor,
                                                            std::optional<std::size_t> s) {
  std::map<std::size_t, const ExperimentRecord*> out;
  for (const auto& rec : r.records) {
    if (rec.dataset == dataset && rec.regressor == regressor && rec.s == s && rec.ok()) {
      out[rec.fold] = &rec;
    }
  }
  return out;
}

double fold_mean(const std::map<std::size_t, const ExperimentRecord*>& recs, bool test) {
  if (recs.empty()) return kNaN;
  double sum = 0.0;
  for (const auto& [fold, rec] : recs) sum += test ? rec->test_rmse : rec->train_rmse;
  return sum / static_cast<double>(recs.size());
}

void require_s(const ExperimentResult& r, std::size_t s) {
  const auto all = s_values(r);
  if (std::find(all.begin(), all.end(), s) == all.end()) {
    throw Error(ErrorCode::NotFound, "no records for s = " + std::to_string(s));
  }
}

}  // namespace

void write_records(std::ostream& out, const ExperimentResult& r) {
  for (const auto& rec : r.records) {
    ordered_json j;
    j["dataset"] = rec.dataset;
    j["fold"] = rec.fold;
    j["regressor"] = rec.regressor;
    j["kind"] = to_string(rec.kind);
    j["variant"] = rec.augmented() ? "augmented" : "native";
    j["s"] = rec.s ? ordered_json(*rec.s) : ordered_json(nullptr);
    j["effective_s"] = rec.effective_s ? ordered_json(*rec.effective_s) : ordered_json(nullptr);
    j["train_rmse"] = real_or_null(rec.train_rmse);
    j["test_rmse"] = real_or_null(rec.test_rmse);
    j["params"] = rec.params;
    j["error"] = rec.error ? ordered_json(*rec.error) : ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

void write_records_file(const std::string& path, const ExperimentResult& r) {
  auto out = open_out(path);
  write_records(out, r);
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

ExperimentResult read_records(std::istream& in) {
  ExperimentResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "records line " + std::to_string(line_no);
    try {
      const auto j = ordered_json::parse(line);
      ExperimentRecord rec;
      rec.dataset = j.at("dataset").get<std::string>();
      rec.fold = j.at("fold").get<std::size_t>();
      rec.regressor = j.at("regressor").get<std::string>();
      const auto kind = parse_regressor_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::Parse, where + ": unknown regressor kind");
      rec.kind = *kind;
      const auto variant = j.at("variant").get<std::string>();
      if (!j.at("s").is_null()) rec.s = j.at("s").get<std::size_t>();
      if ((variant == "augmented") != rec.s.has_value() || (variant != "native" && variant != "augmented")) {
        throw Error(ErrorCode::Parse, where + ": variant and s disagree");
      }
      if (!j.at("effective_s").is_null()) rec.effective_s = j.at("effective_s").get<std::size_t>();
      rec.train_rmse = j.at("train_rmse").is_null() ? kNaN : j.at("train_rmse").get<double>();
      rec.test_rmse = j.at("test_rmse").is_null() ? kNaN : j.at("test_rmse").get<double>();
      rec.params = j.at("params").get<std::string>();
      if (!j.at("error").is_null()) rec.error = j.at("error").get<std::string>();
      if (rec.ok() && !(rec.test_rmse >= 0.0 && rec.train_rmse >= 0.0)) {
        throw Error(ErrorCode::Parse, where + ": successful record without RMSE values");
      }
      result.records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, where + ": " + e.what());
    }
  }
  return result;
}

ExperimentResult read_records_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read records file '" + path + "'");
  return read_records(in);
}

ExperimentResult merge_results(const std::vector<ExperimentResult>& parts) {
  ExperimentResult out;
  std::set<std::tuple<std::string, std::size_t, std::string, std::size_t, bool>> seen;
  for (const auto& part : parts) {
    for (const auto& rec : part.records) {
      const auto key = std::make_tuple(rec.dataset, rec.fold, rec.regressor, rec.s.value_or(0), rec.s.has_value());
      if (!seen.insert(key).second) {
        throw Error(ErrorCode::InvalidArgument,
                    "duplicate record for dataset '" + rec.dataset + "', fold " + std::to_string(rec.fold) +
                        ", regressor '" + rec.regressor + "'");
      }
      out.records.push_back(rec);
    }
  }
  return out;
}

void write_timings_file(const std::string& path, const ExperimentResult& r) {
  auto out = open_out(path);
  out << "dataset\tfold\tregressor\tvariant\ts\twall_time_s\n";
  for (const auto& rec : r.records) {
    out << rec.dataset << '\t' << rec.fold << '\t' << rec.regressor << '\t'
        << (rec.augmented() ? "augmented" : "native") << '\t'
        << (rec.s ? std::to_string(*rec.s) : std::string("-")) << '\t' << format_real(rec.wall_time_s) << '\n';
  }
}

std::vector<std::string> dataset_names(const ExperimentResult& r) {
  return unique_in_order(r, [](const ExperimentRecord& rec) { return rec.dataset; });
}

std::vector<std::string> regressor_names(const ExperimentResult& r) {
  return unique_in_order(r, [](const ExperimentRecord& rec) { return rec.regressor; });
}

std::vector<std::size_t> s_values(const ExperimentResult& r) {
  std::set<std::size_t> s;
  for (const auto& rec : r.records) {
    if (rec.s) s.insert(*rec.s);
  }
  return {s.begin(), s.end()};
}

SummaryTable build_summary_table(const ExperimentResult& r, std::size_t s) {
  require_s(r, s);
  SummaryTable t;
  t.s = s;
  t.regressors = regressor_names(r);
  std::vector<std::vector<ComparisonCell>> columns(t.regressors.size());
  for (const auto& ds : dataset_names(r)) {
    SummaryRow row;
    row.dataset = ds;
    for (std::size_t j = 0; j < t.regressors.size(); ++j) {
      const auto native = fold_records(r, ds, t.regressors[j], std::nullopt);
      const auto aug = fold_records(r, ds, t.regressors[j], s);
      std::vector<double> a, b;
      for (const auto& [fold, rec] : native) {
        const auto it = aug.find(fold);
        if (it == aug.end()) continue;
        a.push_back(rec->test_rmse);
        b.push_back(it->second->test_rmse);
      }
      SummaryCell cell;
      cell.regressor = t.regressors[j];
      cell.folds = a.size();
      if (a.size() >= 2) {
        cell.comparison = compare(a, b);
      } else {
        cell.comparison.native_rmse_mean = a.empty() ? kNaN : a[0];
        cell.comparison.aug_rmse_mean = b.empty() ? kNaN : b[0];
      }
      columns[j].push_back(cell.comparison);
      row.cells.push_back(cell);
    }
    t.rows.push_back(std::move(row));
  }
  for (const auto& col : columns) {
    double n = 0.0, a = 0.0;
    for (const auto& c : col) {
      n += c.native_rmse_mean;
      a += c.aug_rmse_mean;
    }
    const double count = static_cast<double>(col.size());
    t.native_mean.push_back(col.empty() ? kNaN : n / count);
    t.aug_mean.push_back(col.empty() ? kNaN : a / count);
    t.tally.push_back(win_tie_loss(col));
  }
  return t;
}

void write_summary_csv(std::ostream& out, const SummaryTable& t) {
  out << "dataset";
  for (const auto& reg : t.regressors) out << ',' << reg << "_native," << reg << "_aug," << reg << "_p," << reg << "_outcome";
  out << '\n';
  for (const auto& row : t.rows) {
    out << row.dataset;
    for (const auto& cell : row.cells) {
      const auto& c = cell.comparison;
      out << ',' << format_real(c.native_rmse_mean) << ',' << format_real(c.aug_rmse_mean) << ','
          << format_real(c.p_value) << ',' << to_string(c.outcome);
    }
    out << '\n';
  }
  out << "mean";
  for (std::size_t j = 0; j < t.regressors.size(); ++j) {
    out << ',' << format_real(t.native_mean[j]) << ',' << format_real(t.aug_mean[j]) << ",,";
  }
  out << '\n' << "loss/tie/win";
  for (const auto& w : t.tally) out << ",,,," << w.losses << '/' << w.ties << '/' << w.wins;
  out << '\n';
}

std::vector<SCurvePoint> build_s_curve(const ExperimentResult& r, const std::string& regressor,
                                       const std::string& dataset) {
  const auto regs = regressor_names(r);
  if (std::find(regs.begin(), regs.end(), regressor) == regs.end()) {
    throw Error(ErrorCode::NotFound, "no records for regressor '" + regressor + "'");
  }
  const auto dss = dataset_names(r);
  if (std::find(dss.begin(), dss.end(), dataset) == dss.end()) {
    throw Error(ErrorCode::NotFound, "no records for dataset '" + dataset + "'");
  }
  const auto native = fold_records(r, dataset, regressor, std::nullopt);
  const double native_train = fold_mean(native, false);
  const double native_test = fold_mean(native, true);
  std::vector<SCurvePoint> curve;
  for (std::size_t s : s_values(r)) {
    const auto aug = fold_records(r, dataset, regressor, s);
    curve.push_back({s, fold_mean(aug, false), fold_mean(aug, true), native_train, native_test});
  }
  if (curve.empty()) throw Error(ErrorCode::NotFound, "no augmented records for the s-curve");
  return curve;
}

void write_s_curve_tsv(std::ostream& out, const std::vector<SCurvePoint>& curve) {
  out << "s\ttrain_rmse\ttest_rmse\tnative_train_rmse\tnative_test_rmse\n";
  for (const auto& p : curve) {
    out << p.s << '\t' << format_real(p.train_rmse) << '\t' << format_real(p.test_rmse) << '\t'
        << format_real(p.native_train_rmse) << '\t' << format_real(p.native_test_rmse) << '\n';
  }
}

CriticalDiagram build_critical_diagram(const RankSummary& rank, const std::vector<std::string>& variant_names) {
  if (variant_names.size() != rank.mean_ranks.size()) {
    throw Error(ErrorCode::Dimension, "variant names do not match the rank summary");
  }
  std::vector<std::size_t> order(rank.mean_ranks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rank.mean_ranks[a] < rank.mean_ranks[b]; });
  CriticalDiagram d;
  d.cd = rank.cd;
  d.n_datasets = rank.n_datasets;
  d.friedman_chi2 = rank.friedman_chi2;
  d.iman_davenport_f = rank.iman_davenport_f;
  for (std::size_t i : order) {
    d.variants.push_back(variant_names[i]);
    d.mean_ranks.push_back(rank.mean_ranks[i]);
  }
  // Farthest variant reachable from each start; a run is kept unless the
  // previous start already reaches as far (then it is contained in that run).
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < d.mean_ranks.size(); ++i) {
    std::size_t j = i;
    while (j + 1 < d.mean_ranks.size() && d.mean_ranks[j + 1] - d.mean_ranks[i] < d.cd) ++j;
    if (i == 0 || j > prev_end) d.groups.emplace_back(i, j);
    prev_end = std::max(prev_end, j);
  }
  return d;
}

VariantTable build_variant_table(const ExperimentResult& r, std::size_t s) {
  require_s(r, s);
  VariantTable t;
  t.datasets = dataset_names(r);
  const auto regs = regressor_names(r);
  for (const auto& reg : regs) {
    t.variants.push_back(reg);
    t.variants.push_back(reg + "+");
  }
  t.rmse = Matrix(t.datasets.size(), t.variants.size());
  for (std::size_t i = 0; i < t.datasets.size(); ++i) {
    for (std::size_t j = 0; j < regs.size(); ++j) {
      for (int aug = 0; aug < 2; ++aug) {
        const auto recs = fold_records(r, t.datasets[i], regs[j], aug ? std::optional<std::size_t>(s) : std::nullopt);
        if (recs.empty()) {
          throw Error(ErrorCode::NotFound, "no successful folds for '" + t.variants[2 * j + aug] + "' on dataset '" +
                                               t.datasets[i] + "'");
        }
        t.rmse(i, 2 * j + aug) = fold_mean(recs, true);
      }
    }
  }
  return t;
}

void write_critical_diagram_tsv(std::ostream& out, const CriticalDiagram& cd) {
  out << "# cd\t" << format_real(cd.cd) << '\n'
      << "# n_datasets\t" << cd.n_datasets << '\n'
      << "# friedman_chi2\t" << format_real(cd.friedman_chi2) << '\n'
      << "# iman_davenport_f\t" << format_real(cd.iman_davenport_f) << '\n'
      << "variant\tmean_rank\tgroups\n";
  for (std::size_t i = 0; i < cd.variants.size(); ++i) {
    std::string groups;
    for (std::size_t g = 0; g < cd.groups.size(); ++g) {
      if (cd.groups[g].first <= i && i <= cd.groups[g].second) {
        if (!groups.empty()) groups += ',';
        groups += std::to_string(g + 1);
      }
    }
    out << cd.variants[i] << '\t' << format_real(cd.mean_ranks[i]) << '\t' << groups << '\n';
  }
}

std::string summary_file_name(std::size_t s) { return "summary_s" + std::to_string(s) + ".csv"; }

std::string s_curve_file_name(const std::string& regressor, const std::string& dataset) {
  return "scurve_" + sanitize(regressor) + "_" + sanitize(dataset) + ".tsv";
}

void write_summary_file(const std::string& path, const ExperimentResult& r, std::size_t s) {
  const auto t = build_summary_table(r, s);
  auto out = open_out(path);
  write_summary_csv(out, t);
}

void write_s_curve_file(const std::string& path, const ExperimentResult& r, const std::string& regressor,
                        const std::string& dataset) {
  const auto curve = build_s_curve(r, regressor, dataset);
  auto out = open_out(path);
  write_s_curve_tsv(out, curve);
}

void write_critical_diagram_file(const std::string& path, const ExperimentResult& r, std::size_t s) {
  const auto table = build_variant_table(r, s);
  const auto rank = friedman_mean_ranks(table.rmse, kSignificanceLevel);
  const auto diagram = build_critical_diagram(rank, table.variants);
  auto out = open_out(path);
  write_critical_diagram_tsv(out, diagram);
}

std::vector<std::string> write_default_reports(const std::string& dir, const ExperimentResult& r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

  write_records_file(path(kRecordsFile), r);
  written.push_back(path(kRecordsFile));
  write_timings_file(path(kTimingsFile), r);
  written.push_back(path(kTimingsFile));

  const auto svals = s_values(r);
  for (std::size_t s : svals) {
    write_summary_file(path(summary_file_name(s)), r, s);
    written.push_back(path(summary_file_name(s)));
  }
  if (!svals.empty()) {
    for (const auto& reg : regressor_names(r)) {
      for (const auto& ds : dataset_names(r)) {
        write_s_curve_file(path(s_curve_file_name(reg, ds)), r, reg, ds);
        written.push_back(path(s_curve_file_name(reg, ds)));
      }
    }
    const std::size_t variants = 2 * regressor_names(r).size();
    // Skipped when some variant has no successful fold on some dataset.
    if (dataset_names(r).size() >= 2 && variants >= 2 && variants <= 10) {
      try {
        write_critical_diagram_file(path(kCriticalDiagramFile), r, svals.back());
        written.push_back(path(kCriticalDiagramFile));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFound) throw;
      }
    }
  }
  return written;
}

}  // namespace threshaug
