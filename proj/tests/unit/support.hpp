#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mlcheck/schema.hpp"
#include "mlcheck/smt.hpp"
#include "mlcheck/surrogate.hpp"

namespace testing_support {

using namespace mlcheck;

inline std::string binary_schema_xml(std::size_t features, std::size_t classes = 2,
                                     const std::vector<std::string>& labels = {"lab"}) {
  std::string xml = "<schema>\n";
  for (std::size_t i = 0; i < features; ++i) {
    xml += "  <feature name=\"f" + std::to_string(i) + "\" kind=\"categorical\" categories=\"0,1\"/>\n";
  }
  for (const auto& l : labels) {
    std::string cls;
    for (std::size_t c = 0; c < classes; ++c) cls += (c ? "," : "") + std::to_string(c);
    xml += "  <label name=\"" + l + "\" classes=\"" + cls + "\"/>\n";
  }
  return xml + "</schema>\n";
}

inline DatasetSchema binary_schema(std::size_t features, std::size_t classes = 2,
                                   const std::vector<std::string>& labels = {"lab"}) {
  return parse_schema(binary_schema_xml(features, classes, labels));
}

/// Every point of a small, fully-discrete space, in lexicographic order.
inline std::vector<Instance> enumerate(const DatasetSchema& schema) {
  std::vector<Instance> out{Instance{}};
  for (const auto& f : schema.features()) {
    std::vector<Rational> values;
    if (f.kind == FeatureKind::categorical) {
      for (auto c : f.categories) values.emplace_back(c);
    } else {
      for (auto v = to_int64(ceil(f.min)); v <= to_int64(floor(f.max)); ++v) values.emplace_back(v);
    }
    std::vector<Instance> next;
    for (const auto& prefix : out) {
      for (const auto& v : values) {
        Instance x = prefix;
        x.values.push_back(v);
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Independent tree walk: follow the child whose edge condition holds,
/// evaluated directly from the node fields.
inline Prediction walk_tree(const DecisionTree& tree, const Instance& x) {
  std::size_t id = 0;
  while (!tree.nodes[id].leaf) {
    std::size_t next = tree.nodes.size();
    for (auto child : tree.nodes[id].children) {
      const auto& e = *tree.nodes[child].edge;
      const Rational& v = x.values[e.feature];
      bool ok = e.op == SplitOp::le ? v <= e.threshold
                : e.op == SplitOp::gt ? v > e.threshold
                : e.op == SplitOp::eq ? v == e.threshold
                                      : v != e.threshold;
      if (ok) next = child;
    }
    id = next;
  }
  return *tree.nodes[id].leaf;
}

/// Float forward pass returning every pre-activation layer.
inline std::vector<std::vector<double>> float_forward(const MlpSurrogate& net, const Instance& x) {
  std::vector<double> cur;
  for (std::size_t j = 0; j < x.values.size(); ++j) {
    cur.push_back((to_double(x.values[j]) - to_double(net.input_offset[j])) * to_double(net.input_scale[j]));
  }
  std::vector<std::vector<double>> pre;
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    std::vector<double> in(net.layer_sizes[i + 1]);
    for (std::size_t l = 0; l < in.size(); ++l) {
      double s = to_double(net.biases[i][l]);
      for (std::size_t j = 0; j < cur.size(); ++j) s += to_double(net.weights[i][j][l]) * cur[j];
      in[l] = s;
    }
    pre.push_back(in);
    cur = in;
    for (auto& v : cur) v = std::max(0.0, v);
  }
  return pre;
}

/// A net with random quantized parameters.
inline MlpSurrogate random_net(const DatasetSchema& schema, const std::vector<std::size_t>& hidden, Rng& rng,
                               std::size_t outputs, bool argmax = true) {
  MlpSurrogate net;
  net.layer_sizes.push_back(schema.f_size());
  for (auto h : hidden) net.layer_sizes.push_back(h);
  net.layer_sizes.push_back(outputs);
  set_input_scaling(net, schema);
  std::uniform_int_distribution<int> w(-2000, 2000);
  for (std::size_t i = 0; i + 1 < net.layer_sizes.size(); ++i) {
    net.weights.emplace_back(net.layer_sizes[i], std::vector<Rational>(net.layer_sizes[i + 1]));
    for (auto& row : net.weights.back()) {
      for (auto& v : row) v = Rational(w(rng), 1000);
    }
    net.biases.emplace_back(net.layer_sizes[i + 1]);
    for (auto& v : net.biases.back()) v = Rational(w(rng), 1000);
  }
  for (auto& row : net.weights) {
    for (auto& r : row) {
      for (auto& v : r) v.canonicalize();
    }
  }
  for (auto& b : net.biases) {
    for (auto& v : b) v.canonicalize();
  }
  if (argmax) {
    net.mode = MlpSurrogate::Mode::argmax;
    for (std::size_t c = 0; c < outputs; ++c) net.class_codes.push_back(static_cast<std::int64_t>(c));
  } else {
    net.mode = MlpSurrogate::Mode::threshold;
  }
  return net;
}

inline SolverConfig solver_config() {
  SolverConfig cfg;
  cfg.command = default_solver_command();
  return cfg;
}

}  // namespace testing_support
