#include <json.hpp>

#include "mlcheck/error.hpp"
#include "mlcheck/surrogate.hpp"

namespace mlcheck {

using nlohmann::json;

Prediction surrogate_predict(const Surrogate& model, const Instance& x) {
  if (const auto* tree = std::get_if<DecisionTree>(&model)) return dt_predict(*tree, x);
  return mlp_forward(std::get<MlpSurrogate>(model), x).prediction;
}

namespace {

json rationals(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

std::vector<Rational> read_rationals(const json& j) {
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(parse_rational(v.get<std::string>()));
  return out;
}

SplitOp parse_split_op(const std::string& s) {
  if (s == "<=") return SplitOp::le;
  if (s == ">") return SplitOp::gt;
  if (s == "==") return SplitOp::eq;
  if (s == "!=") return SplitOp::ne;
  throw Error("unknown split operator '" + s + "'");
}

json tree_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json node{{"level", n.level}, {"index", n.index}, {"children", n.children}};
    if (n.parent) node["parent"] = *n.parent;
    if (n.edge) {
      node["edge"] = {{"feature", n.edge->feature},
                      {"op", std::string(to_string(n.edge->op))},
                      {"threshold", to_string(n.edge->threshold)}};
    }
    if (n.leaf) node["leaf"] = n.leaf->classes;
    nodes.push_back(std::move(node));
  }
  return {{"type", "dt"}, {"nodes", std::move(nodes)}};
}

json mlp_json(const MlpSurrogate& net) {
  json weights = json::array();
  for (const auto& layer : net.weights) {
    json rows = json::array();
    for (const auto& row : layer) rows.push_back(rationals(row));
    weights.push_back(std::move(rows));
  }
  json biases = json::array();
  for (const auto& b : net.biases) biases.push_back(rationals(b));
  json out{{"type", "nn"},
           {"layer_sizes", net.layer_sizes},
           {"weights", std::move(weights)},
           {"biases", std::move(biases)},
           {"input_offset", rationals(net.input_offset)},
           {"input_scale", rationals(net.input_scale)},
           {"mode", net.mode == MlpSurrogate::Mode::argmax ? "argmax" : "threshold"},
           {"threshold", to_string(net.threshold)},
           {"class_codes", net.class_codes}};
  return out;
}

}  // namespace

std::string to_json(const DecisionTree& tree) { return tree_json(tree).dump(); }
std::string to_json(const MlpSurrogate& net) { return mlp_json(net).dump(); }
std::string to_json(const Surrogate& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

Surrogate surrogate_from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    const std::string type = j.at("type").get<std::string>();
    if (type == "dt") {
      DecisionTree tree;
      for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.level = n.at("level").get<std::size_t>();
        node.index = n.at("index").get<std::size_t>();
        node.children = n.at("children").get<std::vector<std::size_t>>();
        if (n.contains("parent")) node.parent = n["parent"].get<std::size_t>();
        if (n.contains("edge")) {
          const auto& e = n["edge"];
          node.edge = EdgeCondition{e.at("feature").get<std::size_t>(), parse_split_op(e.at("op").get<std::string>()),
                                    parse_rational(e.at("threshold").get<std::string>())};
        }
        if (n.contains("leaf")) node.leaf = Prediction{n["leaf"].get<std::vector<std::int64_t>>()};
        tree.nodes.push_back(std::move(node));
      }
      if (tree.nodes.empty()) throw Error("tree has no nodes");
      return tree;
    }
    if (type == "nn") {
      MlpSurrogate net;
      net.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
      for (const auto& layer : j.at("weights")) {
        std::vector<std::vector<Rational>> rows;
        for (const auto& row : layer) rows.push_back(read_rationals(row));
        net.weights.push_back(std::move(rows));
      }
      for (const auto& b : j.at("biases")) net.biases.push_back(read_rationals(b));
      net.input_offset = read_rationals(j.at("input_offset"));
      net.input_scale = read_rationals(j.at("input_scale"));
      net.mode = j.at("mode").get<std::string>() == "argmax" ? MlpSurrogate::Mode::argmax
                                                              : MlpSurrogate::Mode::threshold;
      net.threshold = parse_rational(j.at("threshold").get<std::string>());
      net.class_codes = j.at("class_codes").get<std::vector<std::int64_t>>();
      if (net.layer_sizes.size() < 2 || net.weights.size() != net.layer_sizes.size() - 1) {
        throw Error("network layers do not match layer_sizes");
      }
      return net;
    }
    throw Error("unknown surrogate type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(std::string("malformed surrogate json: ") + e.what());
  }
}

}  // namespace mlcheck
