#include "threshaug/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace threshaug {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail("unknown key '" + where + "." + key + "'");
  }
}

std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

int as_depth(const json& v, const std::string& key) {
  if (v.is_null()) return -1;
  if (v.is_string() && v.get<std::string>() == "unlimited") return -1;
  return static_cast<int>(as_count(v, key));
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key + " must be a number");
  return v.get<double>();
}

FeatureFraction as_features(const json& v, const std::string& key) {
  if (v.is_string()) {
    if (auto f = FeatureFraction::parse(v.get<std::string>())) return *f;
  } else if (v.is_number_unsigned()) {
    return FeatureFraction{FeatureFraction::Rule::Count, v.get<std::size_t>()};
  }
  fail(key + " must be \"sqrt\", \"third\", \"all\" or a positive integer");
}

using Setter = void (*)(RegressorParams&, const json&, const std::string&);

struct ParamDef {
  const char* name;
  Setter set;
};

const std::vector<ParamDef>& param_defs(RegressorKind kind) {
  static const std::vector<ParamDef> tree = {
      {"max_depth", [](RegressorParams& p, const json& v, const std::string& k) { p.max_depth = as_depth(v, k); }},
      {"min_leaf", [](RegressorParams& p, const json& v, const std::string& k) { p.min_leaf = as_count(v, k); }},
  };
  static const std::vector<ParamDef> forest = {
      {"n_trees", [](RegressorParams& p, const json& v, const std::string& k) { p.n_trees = as_count(v, k); }},
      {"max_depth", [](RegressorParams& p, const json& v, const std::string& k) { p.max_depth = as_depth(v, k); }},
      {"max_features", [](RegressorParams& p, const json& v, const std::string& k) { p.max_features = as_features(v, k); }},
  };
  static const std::vector<ParamDef> gbt = {
      {"learning_rate", [](RegressorParams& p, const json& v, const std::string& k) { p.learning_rate = as_real(v, k); }},
      {"n_stages", [](RegressorParams& p, const json& v, const std::string& k) { p.n_stages = as_count(v, k); }},
      {"max_depth", [](RegressorParams& p, const json& v, const std::string& k) { p.max_depth = as_depth(v, k); }},
      {"min_leaf", [](RegressorParams& p, const json& v, const std::string& k) { p.min_leaf = as_count(v, k); }},
  };
  static const std::vector<ParamDef> none;
  switch (kind) {
    case RegressorKind::Tree: return tree;
    case RegressorKind::RandomForest: return forest;
    case RegressorKind::Gbt: return gbt;
    case RegressorKind::Linear: return none;
  }
  return none;
}

std::vector<RegressorParams> parse_grid(RegressorKind kind, const json& grid, const std::string& where) {
  if (!grid.is_object()) fail(where + " must be an object of candidate lists");
  const auto& defs = param_defs(kind);
  for (const auto& [key, value] : grid.items()) {
    bool known = false;
    for (const auto& d : defs) known = known || key == d.name;
    if (!known) fail("unknown grid parameter '" + where + "." + key + "'");
    if (!value.is_array() || value.empty()) fail(where + "." + key + " must be a non-empty list");
  }
  std::vector<RegressorParams> out{RegressorParams{}};
  for (const auto& def : defs) {
    if (!grid.contains(def.name)) continue;
    std::vector<RegressorParams> next;
    for (const auto& base : out) {
      for (const auto& candidate : grid.at(def.name)) {
        RegressorParams p = base;
        def.set(p, candidate, where + "." + def.name);
        next.push_back(p);
      }
    }
    out = std::move(next);
  }
  return out;
}

RegressorSpec parse_regressor(const json& j, std::size_t index) {
  const std::string where = "regressors[" + std::to_string(index) + "]";
  check_keys(j, where, {"kind", "name", "grid"});
  if (!j.contains("kind") || !j.at("kind").is_string()) fail(where + ".kind is required");
  const auto kind = parse_regressor_kind(j.at("kind").get<std::string>());
  if (!kind) fail(where + ".kind '" + j.at("kind").get<std::string>() + "' is not a regressor kind");
  RegressorSpec spec = default_spec(*kind);
  if (j.contains("name")) {
    if (!j.at("name").is_string()) fail(where + ".name must be a string");
    spec.name = j.at("name").get<std::string>();
  }
  if (j.contains("grid")) {
    if (!spec.tunable()) fail(where + ": linear regression takes no grid");
    spec.grid = parse_grid(*kind, j.at("grid"), where + ".grid");
    spec.params = spec.grid.front();
  }
  return spec;
}

DatasetConfig parse_dataset(const json& j, const std::string& where, const std::string& base_dir) {
  check_keys(j, where, {"path", "target", "name", "delimiter", "hints", "date_patterns"});
  DatasetConfig d;
  if (!j.contains("path") || !j.at("path").is_string()) fail(where + ".path is required");
  if (!j.contains("target") || !j.at("target").is_string()) fail(where + ".target is required");
  std::filesystem::path path = j.at("path").get<std::string>();
  if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
  d.path = path.string();
  d.target = j.at("target").get<std::string>();
  d.name = j.contains("name") ? j.at("name").get<std::string>() : path.stem().string();
  if (j.contains("delimiter")) {
    const auto delim = j.at("delimiter").get<std::string>();
    if (delim == "\\t" || delim == "tab") {
      d.load.delimiter = '\t';
    } else if (delim.size() == 1) {
      d.load.delimiter = delim[0];
    } else {
      fail(where + ".delimiter must be a single character");
    }
  }
  if (j.contains("hints")) {
    if (!j.at("hints").is_object()) fail(where + ".hints must be an object");
    for (const auto& [col, kind] : j.at("hints").items()) {
      const auto k = kind.is_string() ? parse_column_kind(kind.get<std::string>()) : std::nullopt;
      if (!k) fail(where + ".hints." + col + " is not a column kind");
      d.load.hints[col] = *k;
    }
  }
  if (j.contains("date_patterns")) {
    for (const auto& p : j.at("date_patterns")) d.load.date_patterns.push_back(p.get<std::string>());
  }
  return d;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(root, "config", {"dataset", "datasets", "experiment", "augmenter", "regressors", "output"});
    ExperimentConfig cfg;
    if (root.contains("dataset")) cfg.datasets.push_back(parse_dataset(root.at("dataset"), "dataset", base_dir));
    if (root.contains("datasets")) {
      const auto& arr = root.at("datasets");
      if (!arr.is_array()) fail("datasets must be an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        cfg.datasets.push_back(parse_dataset(arr[i], "datasets[" + std::to_string(i) + "]", base_dir));
      }
    }
    if (root.contains("experiment")) {
      const auto& e = root.at("experiment");
      check_keys(e, "experiment", {"s_values", "k", "seed", "tuning_fraction"});
      if (e.contains("s_values")) {
        if (!e.at("s_values").is_array()) fail("experiment.s_values must be a list");
        for (const auto& s : e.at("s_values")) cfg.s_values.push_back(as_count(s, "experiment.s_values"));
      }
      if (e.contains("k")) cfg.k = as_count(e.at("k"), "experiment.k");
      if (e.contains("seed")) cfg.seed = e.at("seed").get<std::uint64_t>();
      if (e.contains("tuning_fraction")) cfg.tuning_fraction = as_real(e.at("tuning_fraction"), "experiment.tuning_fraction");
    }
    if (root.contains("augmenter")) {
      const auto& a = root.at("augmenter");
      check_keys(a, "augmenter", {"n_trees", "max_depth", "min_leaf"});
      if (a.contains("n_trees")) cfg.forest.n_trees = as_count(a.at("n_trees"), "augmenter.n_trees");
      if (a.contains("max_depth")) cfg.forest.max_depth = as_depth(a.at("max_depth"), "augmenter.max_depth");
      if (a.contains("min_leaf")) cfg.forest.min_leaf = as_count(a.at("min_leaf"), "augmenter.min_leaf");
    }
    if (root.contains("regressors")) {
      const auto& regs = root.at("regressors");
      if (!regs.is_array()) fail("regressors must be an array");
      for (std::size_t i = 0; i < regs.size(); ++i) cfg.regressors.push_back(parse_regressor(regs[i], i));
    }
    if (root.contains("output")) {
      const auto& o = root.at("output");
      check_keys(o, "output", {"dir"});
      if (o.contains("dir")) cfg.output_dir = o.at("dir").get<std::string>();
    }
    validate_config(cfg);
    return cfg;
  } catch (const json::exception& e) {
    fail(std::string("config has a value of the wrong type: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace threshaug
