#include "threshaug/forest.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "threshaug/parallel.hpp"
#include "threshaug/random.hpp"

namespace threshaug {

std::size_t sqrt_features(std::size_t d) noexcept {
  auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  while ((k + 1) * (k + 1) <= d) ++k;
  while (k * k > d) --k;
  return std::max<std::size_t>(k, 1);
}

std::size_t ForestModel::votes(std::span<const double> row) const {
  std::size_t v = 0;
  for (const auto& tree : trees_) {
    if (tree.predict(row) > 0.5) ++v;
  }
  return v;
}

ForestModel fit_forest_classifier(const Matrix& x, std::span<const std::uint8_t> labels,
                                  const ForestParams& params, std::uint64_t seed) {
  if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "cannot fit a forest on empty data");
  if (x.rows() != labels.size()) {
    throw Error(ErrorCode::Dimension, "feature rows and label length differ");
  }
  if (params.n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be at least 1");

  const std::size_t n = x.rows();
  const std::size_t max_features =
      params.max_features == 0 ? sqrt_features(x.cols()) : params.max_features;
  TreeParams tree_params{params.max_depth, params.min_leaf, max_features};

  std::vector<DecisionTree> trees(params.n_trees);
  parallel_for(params.n_trees, params.jobs, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::uint32_t> samples(n);
    if (params.bootstrap) {
      for (auto& s : samples) s = static_cast<std::uint32_t>(rng.index(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) samples[i] = static_cast<std::uint32_t>(i);
    }
    trees[t] = grow_classification_tree(x, labels, samples, tree_params, &rng);
  });
  return ForestModel(std::move(trees), x.cols(), seed, max_features);
}

std::vector<double> predict_class_probability(const ForestModel& m, const Matrix& x) {
  if (x.cols() != m.n_features()) {
    throw Error(ErrorCode::Dimension, "forest expects " + std::to_string(m.n_features()) +
                                          " columns, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  const double trees = static_cast<double>(m.n_trees());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out[r] = static_cast<double>(m.votes(x.row(r))) / trees;
  }
  return out;
}

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double read_hex(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw Error(ErrorCode::Parse, "forest: truncated input");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw Error(ErrorCode::Parse, "forest: bad real '" + token + "'");
  }
  return v;
}

template <class T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw Error(ErrorCode::Parse, std::string("forest: cannot read ") + what);
  return v;
}

void expect(std::istream& in, const std::string& word) {
  std::string token;
  if (!(in >> token) || token != word) {
    throw Error(ErrorCode::Parse, "forest: expected '" + word + "'");
  }
}

}  // namespace

void save_forest(const ForestModel& m, std::ostream& out) {
  out << "threshaug-forest 1\n";
  out << m.n_trees() << ' ' << m.n_features() << ' ' << m.seed() << ' ' << m.max_features()
      << '\n';
  for (const auto& tree : m.trees()) {
    out << "tree " << tree.nodes().size() << '\n';
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) {
        out << "L " << node.count0 << ' ' << node.count1 << ' ' << hex(node.value) << '\n';
      } else {
        out << "S " << node.feature << ' ' << hex(node.split_value) << '\n';
      }
    }
  }
}

ForestModel load_forest(std::istream& in) {
  expect(in, "threshaug-forest");
  if (read_value<int>(in, "version") != 1) {
    throw Error(ErrorCode::Parse, "forest: unsupported format version");
  }
  const auto n_trees = read_value<std::size_t>(in, "tree count");
  const auto n_features = read_value<std::size_t>(in, "feature count");
  const auto seed = read_value<std::uint64_t>(in, "seed");
  const auto max_features = read_value<std::size_t>(in, "max_features");

  std::vector<DecisionTree> trees;
  trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    expect(in, "tree");
    const auto count = read_value<std::size_t>(in, "node count");
    std::vector<TreeNode> nodes(count);
    // Preorder: rebuild child links with a stack of nodes awaiting a right child.
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < count; ++k) {
      std::string tag = read_value<std::string>(in, "node tag");
      auto& node = nodes[k];
      if (k > 0) {
        if (open.empty()) throw Error(ErrorCode::Parse, "forest: malformed tree");
        auto& parent = nodes[open.back()];
        if (parent.left < 0) {
          parent.left = static_cast<std::int32_t>(k);
        } else {
          parent.right = static_cast<std::int32_t>(k);
          open.pop_back();
        }
      }
      if (tag == "S") {
        node.feature = read_value<std::int32_t>(in, "feature");
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features) {
          throw Error(ErrorCode::Parse, "forest: feature index out of range");
        }
        node.split_value = read_hex(in);
        open.push_back(k);
      } else if (tag == "L") {
        node.count0 = read_value<std::uint32_t>(in, "count0");
        node.count1 = read_value<std::uint32_t>(in, "count1");
        node.value = read_hex(in);
      } else {
        throw Error(ErrorCode::Parse, "forest: unknown node tag '" + tag + "'");
      }
    }
    if (!open.empty() || count == 0) throw Error(ErrorCode::Parse, "forest: incomplete tree");
    trees.emplace_back(std::move(nodes), n_features);
  }
  return ForestModel(std::move(trees), n_features, seed, max_features);
}

std::string to_string(const ForestModel& m) {
  std::ostringstream out;
  save_forest(m, out);
  return out.str();
}

}  // namespace threshaug
