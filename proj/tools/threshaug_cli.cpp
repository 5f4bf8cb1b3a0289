// Command-line front end. Links only against the C interface.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "threshaug/threshaug.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDataset = 3;

constexpr const char* kDefaultOutDir = "threshaug_out";

int report_failure(threshaug_status st, int exit_code) {
  std::cerr << "threshaug: " << threshaug_status_name(st) << ": " << threshaug_last_error() << '\n';
  return exit_code;
}

// Exit code for a failure while loading or running an experiment.
int run_exit_code(threshaug_status st) {
  switch (st) {
    case THRESHAUG_ERR_CONFIG: return kExitConfig;
    case THRESHAUG_ERR_DATASET:
    case THRESHAUG_ERR_PARSE:
    case THRESHAUG_ERR_IO: return kExitDataset;
    default: return kExitRuntime;
  }
}

template <typename Getter>
std::string fetch_string(Getter get) {
  std::size_t needed = 0;
  get(nullptr, 0, &needed);
  std::string s(needed, '\0');
  if (get(s.data(), s.size(), &needed) != THRESHAUG_OK) return {};
  s.resize(needed - 1);
  return s;
}

void log_line(const char* line, void*) { std::cerr << line << '\n'; }

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out;
  std::vector<std::size_t> s_values;
  bool quiet = false;
};

int cmd_run(const RunOptions& o) {
  threshaug_config* cfg = nullptr;
  if (auto st = threshaug_config_load(o.config.c_str(), &cfg); st != THRESHAUG_OK) {
    return report_failure(st, st == THRESHAUG_ERR_CONFIG ? kExitConfig : run_exit_code(st));
  }
  int code = kExitOk;
  threshaug_result* result = nullptr;
  do {
    threshaug_status st = THRESHAUG_OK;
    if (o.seed) st = threshaug_config_set_seed(cfg, *o.seed);
    if (st == THRESHAUG_OK) st = threshaug_config_set_jobs(cfg, o.jobs);
    if (st == THRESHAUG_OK && !o.s_values.empty()) {
      st = threshaug_config_set_s_values(cfg, o.s_values.data(), o.s_values.size());
    }
    if (st != THRESHAUG_OK) {
      code = report_failure(st, kExitConfig);
      break;
    }
    std::string out_dir = o.out;
    if (out_dir.empty()) {
      out_dir = fetch_string([&](char* b, std::size_t n, std::size_t* need) {
        return threshaug_config_output_dir(cfg, b, n, need);
      });
    }
    if (out_dir.empty()) {
      const char* env = std::getenv("THRESHAUG_OUT");
      out_dir = env && *env ? env : kDefaultOutDir;
    }
    st = threshaug_run(cfg, o.quiet ? nullptr : log_line, nullptr, &result);
    if (st != THRESHAUG_OK) {
      code = report_failure(st, run_exit_code(st));
      break;
    }
    std::size_t written = 0;
    st = threshaug_report_default(result, out_dir.c_str(), &written);
    if (st != THRESHAUG_OK) {
      code = report_failure(st, kExitRuntime);
      break;
    }
    const std::size_t failed = threshaug_result_error_count(result);
    std::cout << (std::filesystem::path(out_dir) / "records.jsonl").string() << '\n';
    if (failed > 0) std::cerr << "threshaug: " << failed << " cell(s) failed; see the error field in the records\n";
  } while (false);
  threshaug_result_free(result);
  threshaug_config_free(cfg);
  return code;
}

struct ReportOptions {
  std::vector<std::string> records;
  std::string kind;
  std::optional<std::size_t> s;
  std::string regressor;
  std::string dataset;
  std::string out;
};

int cmd_report(const ReportOptions& o) {
  if (o.kind != "summary" && o.kind != "scurve" && o.kind != "cd") {
    std::cerr << "threshaug: unknown report kind '" << o.kind << "' (summary, scurve or cd)\n";
    return kExitConfig;
  }
  std::vector<threshaug_result*> parts;
  auto free_parts = [&] {
    for (auto* p : parts) threshaug_result_free(p);
  };
  for (const auto& path : o.records) {
    threshaug_result* r = nullptr;
    if (auto st = threshaug_result_load(path.c_str(), &r); st != THRESHAUG_OK) {
      free_parts();
      return report_failure(st, kExitRuntime);
    }
    parts.push_back(r);
  }
  threshaug_result* merged = nullptr;
  auto st = threshaug_result_merge(parts.data(), parts.size(), &merged);
  free_parts();
  if (st != THRESHAUG_OK) return report_failure(st, kExitRuntime);

  std::string out_dir = o.out;
  if (out_dir.empty()) {
    const char* env = std::getenv("THRESHAUG_OUT");
    out_dir = env && *env ? env : std::filesystem::path(o.records.front()).parent_path().string();
  }
  if (out_dir.empty()) out_dir = ".";
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  std::size_t s = 0;
  if (o.s) {
    s = *o.s;
  } else if (o.kind != "scurve") {
    if (st = threshaug_result_max_s(merged, &s); st != THRESHAUG_OK) {
      threshaug_result_free(merged);
      return report_failure(st, kExitRuntime);
    }
  }

  std::string path;
  if (o.kind == "summary") {
    path = (std::filesystem::path(out_dir) /
            fetch_string([&](char* b, std::size_t n, std::size_t* need) { return threshaug_report_summary_name(s, b, n, need); }))
               .string();
    st = threshaug_report_summary(merged, s, path.c_str());
  } else if (o.kind == "cd") {
    path = (std::filesystem::path(out_dir) / "critical_diagram.tsv").string();
    st = threshaug_report_critical_diagram(merged, s, path.c_str());
  } else {
    auto name_at = [&](auto getter, std::size_t i) {
      return fetch_string([&](char* b, std::size_t n, std::size_t* need) { return getter(merged, i, b, n, need); });
    };
    std::string regressor = o.regressor;
    std::string dataset = o.dataset;
    if (regressor.empty() && threshaug_result_regressor_count(merged) == 1) {
      regressor = name_at(threshaug_result_regressor_name, 0);
    }
    if (dataset.empty() && threshaug_result_dataset_count(merged) == 1) {
      dataset = name_at(threshaug_result_dataset_name, 0);
    }
    if (regressor.empty() || dataset.empty()) {
      threshaug_result_free(merged);
      std::cerr << "threshaug: scurve needs --regressor and --dataset when the records hold several\n";
      return kExitConfig;
    }
    path = (std::filesystem::path(out_dir) /
            fetch_string([&](char* b, std::size_t n, std::size_t* need) {
              return threshaug_report_s_curve_name(regressor.c_str(), dataset.c_str(), b, n, need);
            }))
               .string();
    st = threshaug_report_s_curve(merged, regressor.c_str(), dataset.c_str(), path.c_str());
  }
  threshaug_result_free(merged);
  if (st != THRESHAUG_OK) return report_failure(st, kExitRuntime);
  std::cout << path << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& path, const std::string& target, const std::string& delimiter) {
  char delim = 0;
  if (delimiter == "\\t" || delimiter == "tab") {
    delim = '\t';
  } else if (delimiter.size() == 1) {
    delim = delimiter[0];
  } else if (!delimiter.empty()) {
    std::cerr << "threshaug: --delimiter must be one character\n";
    return kExitConfig;
  }
  threshaug_dataset* ds = nullptr;
  if (auto st = threshaug_dataset_load(path.c_str(), target.c_str(), delim, &ds); st != THRESHAUG_OK) {
    return report_failure(st, kExitDataset);
  }
  std::cout << "rows\t" << threshaug_dataset_rows(ds) << '\n'
            << "features\t" << threshaug_dataset_features(ds) << '\n'
            << "dropped_rows\t" << threshaug_dataset_dropped_rows(ds) << '\n';
  for (std::size_t j = 0; j < threshaug_dataset_features(ds); ++j) {
    std::cout << "feature\t"
              << fetch_string([&](char* b, std::size_t n, std::size_t* need) {
                   return threshaug_dataset_feature_name(ds, j, b, n, need);
                 })
              << '\n';
  }
  threshaug_dataset_free(ds);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-classifier feature augmentation for tabular regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(threshaug_version()));

  RunOptions run_opts;
  std::uint64_t seed = 0;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("config,--config", run_opts.config, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--jobs", run_opts.jobs, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", run_opts.out, "Output directory (overrides config and THRESHAUG_OUT)");
    sub->add_flag("--quiet", run_opts.quiet, "No progress lines on stderr");
  };
  auto* run = app.add_subcommand("run", "Run the experiment and write records plus default reports");
  add_run_flags(run);
  auto* sweep = app.add_subcommand("sweep", "Run with the config's s values replaced");
  add_run_flags(sweep);
  sweep->add_option("--s", run_opts.s_values, "Threshold counts, ascending")->required()->delimiter(',');

  ReportOptions rep;
  auto* report = app.add_subcommand("report", "Build one report from records files");
  report->add_option("--records", rep.records, "Records file; repeat to merge runs")->required()->check(
      CLI::ExistingFile);
  report->add_option("--kind", rep.kind, "summary, scurve or cd")->required();
  std::size_t report_s = 0;
  auto* s_opt = report->add_option("--s", report_s, "Threshold count (default: largest present)");
  report->add_option("--regressor", rep.regressor, "Regressor name for scurve");
  report->add_option("--dataset", rep.dataset, "Dataset name for scurve");
  report->add_option("--out", rep.out, "Output directory");

  std::string v_path, v_target, v_delim;
  auto* validate = app.add_subcommand("validate", "Load and preprocess a dataset, print its shape");
  validate->add_option("dataset,--dataset", v_path, "Delimited data file")->required();
  validate->add_option("--target", v_target, "Target column")->required();
  validate->add_option("--delimiter", v_delim, "Field delimiter (default ',')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run || *sweep) {
    if ((*run && run->count("--seed")) || (*sweep && sweep->count("--seed"))) run_opts.seed = seed;
    return cmd_run(run_opts);
  }
  if (*report) {
    if (s_opt->count()) rep.s = report_s;
    return cmd_report(rep);
  }
  return cmd_validate(v_path, v_target, v_delim);
}
