#pragma once

#include <string>

#include "threshaug/harness.hpp"

namespace threshaug {

/// Experiment configuration, JSON text. Keys:
///
///   dataset.path, dataset.target        required (or a "datasets" array of such objects)
///   dataset.name                        defaults to the file stem
///   dataset.delimiter                   one character, default ","
///   dataset.hints                       {column: numeric|categorical|date|identifier|constant}
///   dataset.date_patterns               extra regexes recognised as dates
///   experiment.s_values                 ascending positive integers
///   experiment.k                        fold count, default 10
///   experiment.seed                     unsigned integer, default 0
///   experiment.tuning_fraction          validation share of the training fold, default 0.3
///   augmenter.n_trees                   trees per threshold classifier, default 100
///   augmenter.max_depth / min_leaf      classifier tree limits (null = unlimited depth)
///   regressors                          array of {kind, name?, grid?}
///   output.dir                          output directory
///
/// A regressor grid maps parameter names to candidate lists; omitted
/// parameters keep their defaults and an omitted grid uses default_grid.
/// Grid order is the cartesian product over the kind's parameters in the
/// order listed for default_grid, last varying fastest.
///   tree:          max_depth, min_leaf
///   random_forest: n_trees, max_depth, max_features ("sqrt" | "third" | "all" | integer)
///   gbt:           learning_rate, n_stages, max_depth, min_leaf
/// max_depth accepts null for unlimited. Relative dataset paths resolve
/// against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = {});
ExperimentConfig load_config(const std::string& path);

}  // namespace threshaug
