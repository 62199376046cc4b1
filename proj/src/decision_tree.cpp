#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "mlcheck/error.hpp"
#include "mlcheck/surrogate.hpp"

namespace mlcheck {

bool LabeledSet::add(Instance x, Prediction y) {
  if (!seen_.insert(x).second) return false;
  rows_.push_back({std::move(x), std::move(y)});
  return true;
}

std::string_view to_string(SplitOp op) {
  switch (op) {
    case SplitOp::le:
      return "<=";
    case SplitOp::gt:
      return ">";
    case SplitOp::eq:
      return "==";
    case SplitOp::ne:
      return "!=";
  }
  return "<=";
}

bool EdgeCondition::holds(const Instance& x) const {
  const Rational& v = x.values.at(feature);
  switch (op) {
    case SplitOp::le:
      return v <= threshold;
    case SplitOp::gt:
      return v > threshold;
    case SplitOp::eq:
      return v == threshold;
    case SplitOp::ne:
      return v != threshold;
  }
  return false;
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.level);
  return d;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf.has_value(); }));
}

namespace {

using Counts = std::map<Prediction, std::size_t>;

constexpr double kTieTolerance = 1e-12;

double impurity(const Counts& counts, std::size_t total, SplitCriterion criterion) {
  if (total == 0) return 0;
  double acc = 0;
  for (const auto& [cls, c] : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    acc += criterion == SplitCriterion::gini ? p * p : -p * std::log2(p);
  }
  return criterion == SplitCriterion::gini ? 1.0 - acc : acc;
}

Prediction majority(const Counts& counts) {
  const Prediction* best = nullptr;
  std::size_t best_count = 0;
  // Map order is ascending, so the first maximum is the smallest prediction.
  for (const auto& [cls, c] : counts) {
    if (c > best_count) {
      best = &cls;
      best_count = c;
    }
  }
  return *best;
}

struct Split {
  std::size_t feature;
  bool categorical;
  Rational threshold;
  double score;
};

class TreeBuilder {
 public:
  TreeBuilder(const LabeledSet& data, const DatasetSchema& schema, const DtParams& params)
      : rows_(data.rows()), schema_(schema), params_(params) {}

  DecisionTree build() {
    std::vector<std::size_t> all(rows_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    grow(all, 0, std::nullopt, std::nullopt);
    number_levels();
    return std::move(tree_);
  }

 private:
  Counts count(const std::vector<std::size_t>& idx) const {
    Counts c;
    for (auto i : idx) ++c[rows_[i].y];
    return c;
  }

  std::size_t grow(const std::vector<std::size_t>& idx, std::size_t depth, std::optional<std::size_t> parent,
                   std::optional<EdgeCondition> edge) {
    std::size_t id = tree_.nodes.size();
    tree_.nodes.push_back(TreeNode{depth, 1, parent, edge, {}, std::nullopt});
    Counts counts = count(idx);
    auto split = counts.size() > 1 && depth < params_.max_depth && idx.size() >= params_.min_split
                     ? best_split(idx, counts)
                     : std::nullopt;
    if (!split) {
      tree_.nodes[id].leaf = majority(counts);
      return id;
    }
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    EdgeCondition left_edge{split->feature, split->categorical ? SplitOp::eq : SplitOp::le, split->threshold};
    EdgeCondition right_edge{split->feature, split->categorical ? SplitOp::ne : SplitOp::gt, split->threshold};
    for (auto i : idx) (left_edge.holds(rows_[i].x) ? left : right).push_back(i);
    std::size_t l = grow(left, depth + 1, id, left_edge);
    std::size_t r = grow(right, depth + 1, id, right_edge);
    tree_.nodes[id].children = {l, r};
    return id;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& idx, const Counts& parent_counts) const {
    std::optional<Split> best;
    const std::size_t n = idx.size();
    auto consider = [&](std::size_t feature, bool categorical, const Rational& threshold, const Counts& left,
                        std::size_t nl) {
      std::size_t nr = n - nl;
      if (nl < params_.min_leaf || nr < params_.min_leaf || nl == 0 || nr == 0) return;
      Counts right = parent_counts;
      for (const auto& [cls, c] : left) right[cls] -= c;
      double score = (static_cast<double>(nl) * impurity(left, nl, params_.criterion) +
                      static_cast<double>(nr) * impurity(right, nr, params_.criterion)) /
                     static_cast<double>(n);
      if (!best || score < best->score - kTieTolerance) best = Split{feature, categorical, threshold, score};
    };

    for (std::size_t f = 0; f < schema_.f_size(); ++f) {
      const auto& spec = schema_.feature(f);
      std::vector<std::size_t> sorted = idx;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::size_t a, std::size_t b) { return rows_[a].x.values[f] < rows_[b].x.values[f]; });
      if (spec.kind == FeatureKind::categorical) {
        for (std::size_t s = 0; s < sorted.size();) {
          const Rational& value = rows_[sorted[s]].x.values[f];
          Counts left;
          std::size_t nl = 0;
          std::size_t e = s;
          while (e < sorted.size() && rows_[sorted[e]].x.values[f] == value) {
            ++left[rows_[sorted[e]].y];
            ++nl;
            ++e;
          }
          if (nl < n) consider(f, true, value, left, nl);
          s = e;
        }
      } else {
        Counts left;
        std::size_t nl = 0;
        for (std::size_t s = 0; s + 1 < sorted.size(); ++s) {
          ++left[rows_[sorted[s]].y];
          ++nl;
          const Rational& a = rows_[sorted[s]].x.values[f];
          const Rational& b = rows_[sorted[s + 1]].x.values[f];
          if (a == b) continue;
          Rational mid = (a + b) / 2;
          if (spec.kind == FeatureKind::integer) mid = floor(mid);
          consider(f, false, mid, left, nl);
        }
      }
    }
    return best;
  }

  void number_levels() {
    std::map<std::size_t, std::size_t> next_index;
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
      auto id = queue.front();
      queue.pop_front();
      auto& node = tree_.nodes[id];
      node.index = ++next_index[node.level];
      for (auto c : node.children) queue.push_back(c);
    }
  }

  const std::vector<LabeledSet::Row>& rows_;
  const DatasetSchema& schema_;
  const DtParams& params_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree train_decision_tree(const LabeledSet& data, const DatasetSchema& schema, const DtParams& params) {
  if (data.empty()) throw Error("cannot train a decision tree on empty data");
  if (params.min_leaf == 0 || params.min_split == 0) throw Error("tree parameters must be positive");
  return TreeBuilder(data, schema, params).build();
}

std::size_t dt_leaf(const DecisionTree& tree, const Instance& x) {
  std::size_t id = 0;
  while (!tree.nodes.at(id).leaf) {
    const auto& node = tree.nodes[id];
    std::optional<std::size_t> next;
    for (auto c : node.children) {
      if (tree.nodes[c].edge->holds(x)) {
        next = c;
        break;
      }
    }
    if (!next) throw Error("decision tree edges are not exhaustive");
    id = *next;
  }
  return id;
}

Prediction dt_predict(const DecisionTree& tree, const Instance& x) { return *tree.nodes[dt_leaf(tree, x)].leaf; }

}  // namespace mlcheck
