#include "threshaug/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace threshaug {

namespace {

// Sufficient statistics of a node: count, sum and sum of squares of the
// (centered) targets. Both criteria are functions of these three numbers.
struct Stats {
  double n = 0.0;
  double s = 0.0;
  double ss = 0.0;

  void add(double t) noexcept {
    n += 1.0;
    s += t;
    ss += t * t;
  }
  Stats operator-(const Stats& o) const noexcept { return {n - o.n, s - o.s, ss - o.ss}; }
};

// Classification: n * gini = 2 c1 c0 / n. Regression: sum of squared errors.
double node_cost(const Stats& st, bool classification) noexcept {
  if (st.n <= 0.0) return 0.0;
  if (classification) return 2.0 * st.s * (st.n - st.s) / st.n;
  return std::max(0.0, st.ss - st.s * st.s / st.n);
}

struct Entry {
  double value;
  double target;
};

class Builder {
 public:
  Builder(const Matrix& x, std::span<const double> targets, std::span<const std::uint32_t> samples,
          const TreeParams& params, Rng* rng, bool classification)
      : x_(x),
        targets_(targets),
        idx_(samples.begin(), samples.end()),
        params_(params),
        rng_(rng),
        classification_(classification) {
    buf_.resize(idx_.size());
    perm_.resize(x.cols());
  }

  DecisionTree build() {
    struct Task {
      std::size_t begin, end;
      int depth;
      std::int32_t parent;
      bool is_left;
    };
    std::vector<Task> stack{{0, idx_.size(), 0, -1, false}};
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const auto id = static_cast<std::int32_t>(nodes_.size());
      nodes_.emplace_back();
      if (task.parent >= 0) {
        (task.is_left ? nodes_[task.parent].left : nodes_[task.parent].right) = id;
      }
      std::size_t mid = 0;
      if (try_split(task.begin, task.end, task.depth, nodes_[id], mid)) {
        stack.push_back({mid, task.end, task.depth + 1, id, false});
        stack.push_back({task.begin, mid, task.depth + 1, id, true});
      } else {
        make_leaf(task.begin, task.end, nodes_[id]);
      }
    }
    return DecisionTree(std::move(nodes_), x_.cols());
  }

 private:
  void make_leaf(std::size_t begin, std::size_t end, TreeNode& node) const {
    const double n = static_cast<double>(end - begin);
    if (classification_) {
      double c1 = 0.0;
      for (std::size_t k = begin; k < end; ++k) c1 += targets_[idx_[k]];
      node.count1 = static_cast<std::uint32_t>(c1);
      node.count0 = static_cast<std::uint32_t>(n - c1);
      node.value = node.count1 > node.count0 ? 1.0 : 0.0;
    } else {
      // Anchored at the first target so a pure leaf reproduces it exactly.
      const double anchor = targets_[idx_[begin]];
      double s = 0.0;
      for (std::size_t k = begin; k < end; ++k) s += targets_[idx_[k]] - anchor;
      node.value = anchor + s / n;
      node.count0 = static_cast<std::uint32_t>(end - begin);
    }
  }

  bool is_constant_feature(std::size_t f, std::size_t begin, std::size_t end) const {
    const double first = x_(idx_[begin], f);
    for (std::size_t k = begin + 1; k < end; ++k) {
      if (x_(idx_[k], f) != first) return false;
    }
    return true;
  }

  void candidate_features(std::size_t begin, std::size_t end, std::vector<std::size_t>& out) {
    out.clear();
    const std::size_t d = x_.cols();
    if (params_.max_features == 0 || params_.max_features >= d || rng_ == nullptr) {
      for (std::size_t f = 0; f < d; ++f) out.push_back(f);
      return;
    }
    // Draw without replacement; features constant in this node do not use up
    // the per-split budget.
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < d && out.size() < params_.max_features; ++k) {
      std::swap(perm_[k], perm_[k + rng_->index(d - k)]);
      if (!is_constant_feature(perm_[k], begin, end)) out.push_back(perm_[k]);
    }
    std::sort(out.begin(), out.end());
  }

  bool try_split(std::size_t begin, std::size_t end, int depth, TreeNode& node, std::size_t& mid) {
    const std::size_t n = end - begin;
    if (params_.max_depth >= 0 && depth >= params_.max_depth) return false;
    if (n < 2 * std::max<std::size_t>(params_.min_leaf, 1)) return false;

    const double center = classification_ ? 0.0 : targets_[idx_[begin]];
    Stats total;
    bool pure = true;
    const double first = targets_[idx_[begin]];
    for (std::size_t k = begin; k < end; ++k) {
      const double t = targets_[idx_[k]];
      total.add(t - center);
      pure = pure && t == first;
    }
    if (pure) return false;
    const double parent_cost = node_cost(total, classification_);

    candidate_features(begin, end, features_);
    double best_cost = std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_split = 0.0;
    for (std::size_t f : features_) {
      for (std::size_t k = begin; k < end; ++k) {
        const auto i = idx_[k];
        buf_[k - begin] = {x_(i, f), targets_[i] - center};
      }
      std::sort(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(n),
                [](const Entry& a, const Entry& b) { return a.value < b.value; });
      if (buf_[0].value == buf_[n - 1].value) continue;
      Stats left;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        left.add(buf_[p].target);
        if (!(buf_[p].value < buf_[p + 1].value)) continue;
        const std::size_t n_left = p + 1;
        if (n_left < params_.min_leaf) continue;
        if (n - n_left < params_.min_leaf) break;
        const double cost =
            node_cost(left, classification_) + node_cost(total - left, classification_);
        if (cost < best_cost) {
          best_cost = cost;
          best_feature = static_cast<std::int32_t>(f);
          double split = 0.5 * (buf_[p].value + buf_[p + 1].value);
          if (!(split < buf_[p + 1].value)) split = buf_[p].value;
          best_split = split;
        }
      }
    }
    if (best_feature < 0) return false;
    if (!(parent_cost - best_cost > 1e-12 * parent_cost)) return false;

    const auto split_at = std::partition(
        idx_.begin() + static_cast<std::ptrdiff_t>(begin),
        idx_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::uint32_t i) { return x_(i, static_cast<std::size_t>(best_feature)) <= best_split; });
    mid = static_cast<std::size_t>(split_at - idx_.begin());
    node.feature = best_feature;
    node.split_value = best_split;
    return true;
  }

  const Matrix& x_;
  std::span<const double> targets_;
  std::vector<std::uint32_t> idx_;
  TreeParams params_;
  Rng* rng_;
  bool classification_;
  std::vector<Entry> buf_;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

void check_inputs(const Matrix& x, std::size_t n_targets, std::span<const std::uint32_t> samples) {
  if (x.rows() != n_targets) {
    throw Error(ErrorCode::Dimension, "feature rows and target length differ");
  }
  if (samples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot grow a tree on zero samples");
  }
  for (auto i : samples) {
    if (i >= x.rows()) throw Error(ErrorCode::InvalidArgument, "sample index out of range");
  }
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  std::size_t k = 0;
  while (!nodes_[k].is_leaf()) {
    const auto& node = nodes_[k];
    k = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.split_value
                                     ? node.left
                                     : node.right);
  }
  return nodes_[k];
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    deepest = std::max(deepest, depth[k]);
    if (!nodes_[k].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[k].left)] = depth[k] + 1;
      depth[static_cast<std::size_t>(nodes_[k].right)] = depth[k] + 1;
    }
  }
  return deepest;
}

double gini_impurity(double a, double b) noexcept {
  const double n = a + b;
  if (n <= 0.0) return 0.0;
  return 1.0 - (a * a + b * b) / (n * n);
}

DecisionTree grow_classification_tree(const Matrix& x, std::span<const std::uint8_t> labels,
                                      std::span<const std::uint32_t> samples,
                                      const TreeParams& params, Rng* rng) {
  check_inputs(x, labels.size(), samples);
  std::vector<double> targets(labels.begin(), labels.end());
  return Builder(x, targets, samples, params, rng, true).build();
}

DecisionTree grow_regression_tree(const Matrix& x, std::span<const double> y,
                                  std::span<const std::uint32_t> samples, const TreeParams& params,
                                  Rng* rng) {
  check_inputs(x, y.size(), samples);
  return Builder(x, y, samples, params, rng, false).build();
}

}  // namespace threshaug
