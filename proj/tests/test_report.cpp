#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/synthetic.hpp"
#include "threshaug/error.hpp"
#include "threshaug/random.hpp"
#include "threshaug/report.hpp"

using namespace threshaug;

namespace {

ExperimentRecord rec(const std::string& ds, std::size_t fold, const std::string& reg,
                     std::optional<std::size_t> s, double train, double test) {
  ExperimentRecord r;
  r.dataset = ds;
  r.fold = fold;
  r.regressor = reg;
  r.kind = reg == "tree" ? RegressorKind::Tree : RegressorKind::Linear;
  r.s = s;
  if (s) r.effective_s = s;
  r.train_rmse = train;
  r.test_rmse = test;
  return r;
}

// Random fold RMSEs for datasets x regressors x {native, s...}.
ExperimentResult random_result(std::uint64_t seed, const std::vector<std::string>& datasets,
                               const std::vector<std::string>& regs, const std::vector<std::size_t>& s_values,
                               std::size_t k = 10) {
  Rng rng(seed);
  ExperimentResult r;
  for (const auto& d : datasets)
    for (std::size_t f = 0; f < k; ++f)
      for (const auto& g : regs) {
        r.records.push_back(rec(d, f, g, std::nullopt, rng.uniform(0.2, 0.4), rng.uniform(0.5, 1.0)));
        for (auto s : s_values) r.records.push_back(rec(d, f, g, s, rng.uniform(0.1, 0.3), rng.uniform(0.2, 0.8)));
      }
  return r;
}

}  // namespace

TEST_CASE("constant folds give constant means") {
  ExperimentResult r;
  for (std::size_t f = 0; f < 10; ++f) {
    r.records.push_back(rec("d", f, "linear", std::nullopt, 0.2, 0.7));
    r.records.push_back(rec("d", f, "linear", 4, 0.1, 0.3));
  }
  const auto t = build_summary_table(r, 4);
  REQUIRE(t.rows.size() == 1);
  const auto& c = t.rows[0].cells[0];
  CHECK(c.folds == 10);
  CHECK(c.comparison.native_rmse_mean == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(c.comparison.aug_rmse_mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.comparison.p_value == 0.0);  // zero-spread differences with nonzero mean
  CHECK(c.comparison.outcome == Outcome::Win);
  CHECK_THROWS_AS(build_summary_table(r, 8), Error);
}

TEST_CASE("insignificant difference is reported as a tie") {
  ExperimentResult r;
  const std::vector<double> native{0.5, 0.6, 0.4, 0.55}, aug{0.6, 0.5, 0.45, 0.52};
  for (std::size_t f = 0; f < 4; ++f) {
    r.records.push_back(rec("d", f, "linear", std::nullopt, 0, native[f]));
    r.records.push_back(rec("d", f, "linear", 2, 0, aug[f]));
  }
  const auto t = build_summary_table(r, 2);
  const auto& c = t.rows[0].cells[0].comparison;
  CHECK(c.p_value >= 0.05);
  CHECK(c.outcome == Outcome::Tie);
  CHECK(t.tally[0].ties == 1);
}

TEST_CASE("summary footer matches a recomputation from raw records") {
  const std::vector<std::string> ds{"a", "b", "c", "d", "e"};
  const auto r = random_result(1, ds, {"linear", "tree"}, {2, 8});
  const auto t = build_summary_table(r, 8);
  REQUIRE(t.regressors == std::vector<std::string>{"linear", "tree"});
  REQUIRE(t.rows.size() == 5);
  for (std::size_t g = 0; g < 2; ++g) {
    std::vector<ComparisonCell> cells;
    double native_sum = 0, aug_sum = 0;
    for (const auto& d : ds) {
      std::vector<double> native, aug;
      for (const auto& x : r.records) {
        if (x.dataset != d || x.regressor != t.regressors[g]) continue;
        if (!x.s) native.push_back(x.test_rmse);
        else if (*x.s == 8) aug.push_back(x.test_rmse);
      }
      cells.push_back(compare(native, aug));
      native_sum += cells.back().native_rmse_mean;
      aug_sum += cells.back().aug_rmse_mean;
    }
    CHECK(t.tally[g] == win_tie_loss(cells));
    CHECK(t.native_mean[g] == doctest::Approx(native_sum / 5));
    CHECK(t.aug_mean[g] == doctest::Approx(aug_sum / 5));
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(t.rows[i].cells[g].comparison.p_value == cells[i].p_value);
      CHECK(t.rows[i].cells[g].comparison.outcome == cells[i].outcome);
    }
  }

  std::ostringstream csv;
  write_summary_csv(csv, t);
  const auto text = csv.str();
  CHECK(text.rfind("dataset,linear_native,linear_aug,linear_p,linear_outcome,tree_native", 0) == 0);
  CHECK(text.find("\nmean,") != std::string::npos);
  CHECK(text.find("\nloss/tie/win,") != std::string::npos);
}

TEST_CASE("s-curve points are fold means with a constant native baseline") {
  const auto r = random_result(2, {"a", "b"}, {"linear"}, {2, 4});
  const auto curve = build_s_curve(r, "linear", "b");
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].s == 2);
  CHECK(curve[1].s == 4);
  CHECK(curve[0].native_test_rmse == curve[1].native_test_rmse);
  CHECK(curve[0].native_train_rmse == curve[1].native_train_rmse);
  for (const auto& p : curve) {
    double train = 0, test = 0;
    for (const auto& x : r.records)
      if (x.dataset == "b" && x.s && *x.s == p.s) {
        train += x.train_rmse;
        test += x.test_rmse;
      }
    CHECK(p.train_rmse == doctest::Approx(train / 10));
    CHECK(p.test_rmse == doctest::Approx(test / 10));
  }
  CHECK_THROWS_AS(build_s_curve(r, "gbt", "a"), Error);
  CHECK_THROWS_AS(build_s_curve(r, "linear", "zzz"), Error);
}

TEST_CASE("critical diagram groups") {
  SUBCASE("equal ranks share one group") {
    RankSummary s;
    s.mean_ranks = {1.5, 1.5};
    s.cd = 0.3;
    s.n_datasets = 4;
    const auto d = build_critical_diagram(s, {"x", "y"});
    REQUIRE(d.groups.size() == 1);
    CHECK(d.groups[0] == std::pair<std::size_t, std::size_t>{0, 1});
  }
  SUBCASE("everything within cd is one group") {
    RankSummary s;
    s.mean_ranks = {2.2, 1.9, 2.4, 1.5};
    s.cd = 1.0;
    const auto d = build_critical_diagram(s, {"a", "b", "c", "d"});
    CHECK(d.variants == std::vector<std::string>{"d", "b", "a", "c"});
    REQUIRE(d.groups.size() == 1);
    CHECK(d.groups[0] == std::pair<std::size_t, std::size_t>{0, 3});
  }
  SUBCASE("separated variants are singletons") {
    RankSummary s;
    s.mean_ranks = {3, 1, 2};
    s.cd = 0.5;
    const auto d = build_critical_diagram(s, {"a", "b", "c"});
    REQUIRE(d.groups.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(d.groups[i] == std::pair<std::size_t, std::size_t>{i, i});
  }
  SUBCASE("overlapping cliques") {
    RankSummary s;
    s.mean_ranks = {1.0, 1.6, 2.2};
    s.cd = 1.0;
    const auto d = build_critical_diagram(s, {"a", "b", "c"});
    REQUIRE(d.groups.size() == 2);
    CHECK(d.groups[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(d.groups[1] == std::pair<std::size_t, std::size_t>{1, 2});
  }
  SUBCASE("from records") {
    const auto r = random_result(3, {"a", "b", "c", "d"}, {"linear", "tree"}, {4});
    const auto table = build_variant_table(r, 4);
    CHECK(table.variants == std::vector<std::string>{"linear", "linear+", "tree", "tree+"});
    CHECK(table.rmse.rows() == 4);
    const auto d = build_critical_diagram(friedman_mean_ranks(table.rmse), table.variants);
    CHECK(d.n_datasets == 4);
    std::ostringstream out;
    write_critical_diagram_tsv(out, d);
    CHECK(out.str().rfind("# cd\t", 0) == 0);
    CHECK(out.str().find("variant\tmean_rank\tgroups\n") != std::string::npos);
  }
}

TEST_CASE("records round trip and merge") {
  auto r = random_result(4, {"a"}, {"linear", "tree"}, {2}, 3);
  r.records[1].error = "boom";
  r.records[1].test_rmse = r.records[1].train_rmse = std::nan("");
  r.records[0].params = "max_depth=4;min_leaf=1";
  std::stringstream buf;
  write_records(buf, r);
  const auto text = buf.str();
  CHECK(text.rfind("{\"dataset\":\"a\",\"fold\":0,\"regressor\":\"linear\",\"kind\":\"linear\",\"variant\":\"native\"", 0) == 0);
  const auto back = read_records(buf);
  REQUIRE(back.records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& a = r.records[i];
    const auto& b = back.records[i];
    CHECK(a.dataset == b.dataset);
    CHECK(a.fold == b.fold);
    CHECK(a.regressor == b.regressor);
    CHECK(a.kind == b.kind);
    CHECK(a.s == b.s);
    CHECK(a.effective_s == b.effective_s);
    CHECK(a.params == b.params);
    CHECK(a.error == b.error);
    if (a.ok()) {
      CHECK(a.test_rmse == b.test_rmse);
      CHECK(a.train_rmse == b.train_rmse);
    } else {
      CHECK(std::isnan(b.test_rmse));
    }
  }
  std::ostringstream again;
  write_records(again, back);
  CHECK(again.str() == text);

  const auto other = random_result(5, {"b"}, {"linear", "tree"}, {2}, 3);
  const auto merged = merge_results({r, other});
  CHECK(merged.records.size() == r.records.size() + other.records.size());
  CHECK(dataset_names(merged) == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(merge_results({r, r}), Error);

  std::istringstream bad("{\"dataset\": 3}\n");
  CHECK_THROWS_AS(read_records(bad), Error);
}

TEST_CASE("default report set") {
  const auto dir = synth::scratch_dir("report_default");
  const auto r = random_result(6, {"a", "b", "c"}, {"linear"}, {2, 4});
  const auto paths = write_default_reports(dir.string(), r);
  for (const char* name : {"records.jsonl", "timings.tsv", "summary_s2.csv", "summary_s4.csv",
                           "critical_diagram.tsv", "scurve_linear_a.tsv", "scurve_linear_c.tsv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  CHECK(paths.size() == 8);
  CHECK(summary_file_name(32) == "summary_s32.csv");
  CHECK(s_curve_file_name("linear", "air/foil") == "scurve_linear_air_foil.tsv");

  // Reports are functions of the records alone.
  const auto reread = read_records_file((dir / "records.jsonl").string());
  std::ostringstream a, b;
  write_summary_csv(a, build_summary_table(r, 4));
  write_summary_csv(b, build_summary_table(reread, 4));
  CHECK(a.str() == b.str());
}
