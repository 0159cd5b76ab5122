#pragma once

// Binary classification trees with threshold decision rules, grown by
// entropy purity or by misclassification under type I/II error bounds.

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <memory>
#include <optional>

#include "whpr/classifiers/threshold.hpp"

namespace whpr {

struct NodeStats {
  double purity = 0.0;  // sum_c n_Lc ln p_Lc + n_Rc ln p_Rc
  double chi2 = 0.0;    // purity - sum_c N_c ln(N_c / N)
};

inline NodeStats node_stats(std::span<const std::size_t> left, std::span<const std::size_t> right) {
  if (left.size() != right.size()) throw std::invalid_argument("node_stats: class count mismatch");
  double nl = 0.0, nr = 0.0;
  for (std::size_t c = 0; c < left.size(); ++c) {
    nl += static_cast<double>(left[c]);
    nr += static_cast<double>(right[c]);
  }
  const double n = nl + nr;
  if (n == 0.0) throw DataError("node_stats: all counts are zero");
  auto xlogp = [](double count, double total) { return count > 0.0 ? count * std::log(count / total) : 0.0; };
  NodeStats s;
  double node_term = 0.0;
  for (std::size_t c = 0; c < left.size(); ++c) {
    const double l = static_cast<double>(left[c]);
    const double r = static_cast<double>(right[c]);
    s.purity += xlogp(l, nl) + xlogp(r, nr);
    node_term += xlogp(l + r, n);
  }
  s.chi2 = s.purity - node_term;
  return s;
}

enum class SplitCriterion { Purity, Misclassification };

struct TreeParams {
  std::optional<std::size_t> max_depth;  // capped at floor(log2 N) - 1
  std::size_t min_node = 10;
  std::optional<double> chi2_cutoff;     // default: 95th percentile, M-1 dof
  SplitCriterion criterion = SplitCriterion::Purity;
  double eps_type1 = 1.0;                // misclassification criterion only
  double eps_type2 = 1.0;
};

struct TreeNode {
  // Leaf when `left` is null.
  std::size_t feature = 0;
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;
  int label = 1;
  std::vector<std::size_t> class_counts;  // training samples per class at this node

  bool is_leaf() const { return !left; }
};

struct TreeModel {
  std::shared_ptr<const TreeNode> root;
  int classes = 2;
  std::size_t max_depth = 0;
  std::size_t min_node = 10;
  double chi2_cutoff = 0.0;
  SplitCriterion criterion = SplitCriterion::Purity;
  double eps_type1 = 1.0;
  double eps_type2 = 1.0;

  const TreeNode& leaf_for(std::span<const double> x) const {
    const TreeNode* n = root.get();
    while (!n->is_leaf()) n = x[n->feature] <= n->threshold ? n->left.get() : n->right.get();
    return *n;
  }

  int classify(std::span<const double> x) const { return leaf_for(x).label; }

  /// Fraction of class-2 training samples at the reached leaf.
  double score(std::span<const double> x) const {
    const TreeNode& leaf = leaf_for(x);
    std::size_t total = 0;
    for (std::size_t c : leaf.class_counts) total += c;
    return total == 0 || leaf.class_counts.size() < 2 ? 0.0
                                                        : static_cast<double>(leaf.class_counts[1]) / static_cast<double>(total);
  }

  std::size_t depth() const { return depth_of(root.get()); }

 private:
  static std::size_t depth_of(const TreeNode* n) {
    if (!n || n->is_leaf()) return 0;
    return 1 + std::max(depth_of(n->left.get()), depth_of(n->right.get()));
  }
};

namespace detail {

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double quality = -std::numeric_limits<double>::infinity();  // larger is better
  double chi2 = 0.0;
};

inline int majority(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  int label = 1;
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > best) {
      best = counts[c];
      label = static_cast<int>(c) + 1;
    }
  return label;
}

// Type I / type II rates for the grouping where class c goes left iff most
// of its samples went left. Returns nullopt when a group is empty.
inline std::optional<std::pair<double, double>> type_errors(std::span<const std::size_t> left,
                                                            std::span<const std::size_t> right) {
  std::size_t left_total = 0, left_wrong = 0, right_total = 0, right_wrong = 0;
  for (std::size_t c = 0; c < left.size(); ++c) {
    if (left[c] + right[c] == 0) continue;
    if (left[c] > right[c]) {
      left_total += left[c] + right[c];
      left_wrong += right[c];
    } else {
      right_total += left[c] + right[c];
      right_wrong += left[c];
    }
  }
  if (left_total == 0 || right_total == 0) return std::nullopt;
  return std::pair{static_cast<double>(left_wrong) / static_cast<double>(left_total),
                   static_cast<double>(right_wrong) / static_cast<double>(right_total)};
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledSet& set, const TreeModel& cfg) : set_(set), cfg_(cfg) {}

  std::unique_ptr<TreeNode> grow(std::vector<std::size_t> rows, std::size_t depth) {
    auto node = std::make_unique<TreeNode>();
    node->class_counts.assign(static_cast<std::size_t>(set_.classes), 0);
    for (std::size_t r : rows) ++node->class_counts[static_cast<std::size_t>(set_.labels[r] - 1)];
    node->label = majority(node->class_counts);
    if (depth >= cfg_.max_depth || rows.size() < cfg_.min_node) return node;
    const std::optional<Split> split = best_split(rows);
    if (!split) return node;
    if (cfg_.criterion == SplitCriterion::Purity && split->chi2 < cfg_.chi2_cutoff) return node;
    std::vector<std::size_t> lrows, rrows;
    for (std::size_t r : rows) (set_.features(r, split->feature) <= split->threshold ? lrows : rrows).push_back(r);
    if (lrows.empty() || rrows.empty()) return node;
    node->feature = split->feature;
    node->threshold = split->threshold;
    node->left = grow(std::move(lrows), depth + 1);
    node->right = grow(std::move(rrows), depth + 1);
    return node;
  }

  // Scores every component and every candidate threshold (midpoints between
  // adjacent sorted values with differing labels). First best wins.
  std::optional<Split> best_split(const std::vector<std::size_t>& rows) const {
    const std::size_t C = static_cast<std::size_t>(set_.classes);
    std::optional<Split> best;
    std::vector<std::size_t> total(C, 0);
    for (std::size_t r : rows) ++total[static_cast<std::size_t>(set_.labels[r] - 1)];
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(C), right(C);
    for (std::size_t f = 0; f < set_.dimension(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return set_.features(a, f) < set_.features(b, f); });
      std::fill(left.begin(), left.end(), 0);
      std::size_t k = 0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const std::size_t a = order[i], b = order[i + 1];
        if (set_.labels[a] == set_.labels[b]) continue;
        const double t = 0.5 * (set_.features(a, f) + set_.features(b, f));
        while (k < order.size() && set_.features(order[k], f) <= t) {
          ++left[static_cast<std::size_t>(set_.labels[order[k]] - 1)];
          ++k;
        }
        if (k == 0 || k == order.size()) continue;
        for (std::size_t c = 0; c < C; ++c) right[c] = total[c] - left[c];
        Split s{f, t};
        if (cfg_.criterion == SplitCriterion::Purity) {
          const NodeStats st = node_stats(left, right);
          s.quality = st.purity;
          s.chi2 = st.chi2;
        } else {
          const auto errs = type_errors(left, right);
          if (!errs || !(errs->first < cfg_.eps_type1) || !(errs->second < cfg_.eps_type2)) continue;
          std::size_t wrong = 0;
          const int ll = majority(left), rl = majority(right);
          for (std::size_t c = 0; c < C; ++c) {
            if (static_cast<int>(c) + 1 != ll) wrong += left[c];
            if (static_cast<int>(c) + 1 != rl) wrong += right[c];
          }
          s.quality = -static_cast<double>(wrong);
        }
        if (!best || s.quality > best->quality) best = s;
      }
    }
    return best;
  }

 private:
  const LabeledSet& set_;
  const TreeModel& cfg_;
};

}  // namespace detail

inline double chi2_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::chi_squared(dof), p);
}

/// Grows a tree on `set`. Expansion stops at the depth cap, on small
/// nodes, on a split whose chi^2 falls below the cutoff, or when no
/// admissible threshold exists; leaves take the majority label.
inline TreeModel fit_tree(const LabeledSet& set, const TreeParams& params = {}) {
  set.validate();
  if (set.size() < 2) throw DataError("fit_tree needs at least two samples");
  TreeModel model;
  model.classes = set.classes;
  const double log_cap = std::floor(std::log2(static_cast<double>(set.size()))) - 1.0;
  const std::size_t cap = log_cap > 0.0 ? static_cast<std::size_t>(log_cap) : 0;
  model.max_depth = params.max_depth ? std::min(*params.max_depth, cap) : cap;
  model.min_node = params.min_node;
  model.chi2_cutoff = params.chi2_cutoff.value_or(
      set.classes >= 2 ? chi2_quantile(0.95, static_cast<double>(set.classes - 1)) : 0.0);
  model.criterion = params.criterion;
  model.eps_type1 = params.eps_type1;
  model.eps_type2 = params.eps_type2;
  std::vector<std::size_t> rows(set.size());
  std::iota(rows.begin(), rows.end(), 0);
  detail::TreeBuilder builder(set, model);
  model.root = builder.grow(std::move(rows), 0);
  return model;
}

}  // namespace whpr
