#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mlcheck/rational.hpp"
#include "mlcheck/schema.hpp"

namespace mlcheck {

/// Append-only training data for the white-box surrogate. Adding an instance
/// that is already present is a no-op.
class LabeledSet {
 public:
  struct Row {
    Instance x;
    Prediction y;
  };

  bool add(Instance x, Prediction y);
  bool contains(const Instance& x) const { return seen_.count(x) > 0; }

  const std::vector<Row>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

 private:
  std::vector<Row> rows_;
  std::set<Instance> seen_;
};

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

enum class SplitOp { le, gt, eq, ne };
std::string_view to_string(SplitOp op);

struct EdgeCondition {
  std::size_t feature = 0;
  SplitOp op = SplitOp::le;
  Rational threshold;

  bool holds(const Instance& x) const;
};

struct TreeNode {
  std::size_t level = 0;
  /// 1-based position among the nodes of its level.
  std::size_t index = 1;
  std::optional<std::size_t> parent;
  /// Condition on the edge from the parent; absent for the root.
  std::optional<EdgeCondition> edge;
  std::vector<std::size_t> children;
  /// Set on leaves: one class code per label.
  std::optional<Prediction> leaf;
};

/// Node 0 is the root. Sibling edges are complementary (<= / > on a numeric
/// threshold, == / != on a category), so exactly one leaf is reached.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  std::size_t depth() const;
  std::size_t leaf_count() const;
};

enum class SplitCriterion { gini, entropy };

struct DtParams {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  std::size_t min_split = 2;
  SplitCriterion criterion = SplitCriterion::gini;
};

/// Greedy CART over the composite label vector. Ties on impurity go to the
/// lowest feature index, then the lowest threshold.
DecisionTree train_decision_tree(const LabeledSet& data, const DatasetSchema& schema, const DtParams& params = {});
Prediction dt_predict(const DecisionTree& tree, const Instance& x);
/// Index of the leaf reached by x.
std::size_t dt_leaf(const DecisionTree& tree, const Instance& x);

// ---------------------------------------------------------------------------
// ReLU network
// ---------------------------------------------------------------------------

/// clamp to [-10, 10], then round half away from zero to 3 decimals.
Rational quantize(const Rational& p);
Rational quantize(double p);

struct MlpSurrogate {
  enum class Mode { argmax, threshold };

  /// n, hidden sizes..., outputs.
  std::vector<std::size_t> layer_sizes;
  /// weights[i][j][l]: from neuron j of layer i to neuron l of layer i+1.
  std::vector<std::vector<std::vector<Rational>>> weights;
  /// biases[i][l]: bias of neuron l of layer i+1.
  std::vector<std::vector<Rational>> biases;
  /// Fixed input scaling: layer-0 output j is (x_j - offset_j) * scale_j.
  std::vector<Rational> input_offset;
  std::vector<Rational> input_scale;
  Mode mode = Mode::argmax;
  Rational threshold = 0;
  /// argmax mode: class code of output neuron c (single label).
  std::vector<std::int64_t> class_codes;

  std::size_t hidden_layers() const { return layer_sizes.size() - 2; }
};

struct MlpParams {
  std::vector<std::size_t> hidden = {10, 10};
  std::size_t epochs = 300;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct ForwardPass {
  /// pre_activations[i]: inputs of layer i+1 (hidden layers then output).
  std::vector<std::vector<Rational>> pre_activations;
  /// outputs[i]: outputs of layer i (layer 0 is the scaled input).
  std::vector<std::vector<Rational>> outputs;
  Prediction prediction;
};

MlpSurrogate train_mlp(const LabeledSet& data, const DatasetSchema& schema, const MlpParams& params = {});
/// Exact rational forward pass. argmax ties go to the smallest class code.
ForwardPass mlp_forward(const MlpSurrogate& net, const Instance& x);

/// Input scaling derived from schema ranges (degenerate ranges scale by 1).
void set_input_scaling(MlpSurrogate& net, const DatasetSchema& schema);

// ---------------------------------------------------------------------------

struct TrainParams {
  DtParams dt;
  MlpParams mlp;
};

using Surrogate = std::variant<DecisionTree, MlpSurrogate>;

Prediction surrogate_predict(const Surrogate& model, const Instance& x);

std::string to_json(const DecisionTree& tree);
std::string to_json(const MlpSurrogate& net);
std::string to_json(const Surrogate& model);
Surrogate surrogate_from_json(std::string_view text);

}  // namespace mlcheck
