#include "mlcheck/property_file.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mlcheck/error.hpp"

namespace mlcheck {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class FileParser {
 public:
  FileParser(const DatasetSchema& schema) : schema_(schema) {}

  PropertySpec parse(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      std::string line{text.substr(start, end - start)};
      start = end + 1;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      try {
        statement(line);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), e.position());
      } catch (const Error& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), 0);
      }
      if (end == text.size()) break;
    }
    if (vars_.empty()) throw ParseError("property file has no 'var' line", 0);
    if (!assertion_) throw ParseError("property file has no 'assert' line", 0);
    return build_property(std::move(assumes_), std::move(*assertion_), name_);
  }

 private:
  void statement(const std::string& line) {
    auto space = line.find_first_of(" \t");
    std::string keyword = line.substr(0, space);
    std::string rest = space == std::string::npos ? "" : trim(line.substr(space));
    if (keyword == "name") {
      name_ = rest;
    } else if (keyword == "var") {
      if (!vars_.empty()) throw Error("duplicate 'var' line");
      vars_ = words(rest);
      if (vars_.empty()) throw Error("'var' needs at least one instance variable");
    } else if (keyword == "let") {
      let(rest);
    } else if (keyword == "assume") {
      need_vars();
      assume(rest);
    } else if (keyword == "assert") {
      need_vars();
      if (assertion_) throw Error("more than one 'assert' line");
      assertion_ = AssertClause{parse_condition(rest, {}, schema_, vars_, options_), rest, {}};
    } else {
      throw Error("unknown statement '" + keyword + "'");
    }
  }

  void need_vars() const {
    if (vars_.empty()) throw Error("'var' must come before assume/assert");
  }

  Rational scalar_literal(const std::string& text) const {
    if (auto f = schema_.feature_index(text)) return Rational(static_cast<long>(*f));
    if (auto l = schema_.label_index(text)) return Rational(static_cast<long>(*l));
    if (auto it = options_.bindings.find(text); it != options_.bindings.end()) {
      if (auto* r = std::get_if<Rational>(&it->second)) return *r;
    }
    return parse_rational(text);
  }

  void let(const std::string& rest) {
    auto eq = rest.find('=');
    if (eq == std::string::npos) throw Error("expected 'let <name> = <value>'");
    std::string name = trim(rest.substr(0, eq));
    std::string value = trim(rest.substr(eq + 1));
    if (name.empty() || value.empty()) throw Error("expected 'let <name> = <value>'");
    if (value.front() == '[') {
      if (value.back() != ']') throw Error("unterminated vector literal");
      std::vector<Rational> vec;
      std::string body = value.substr(1, value.size() - 2);
      std::stringstream items(body);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) vec.push_back(scalar_literal(item));
      }
      options_.bindings[name] = vec;
    } else {
      options_.bindings[name] = scalar_literal(value);
    }
  }

  void add_assume(const std::string& cond, const ParseOptions& options) {
    assumes_.push_back({parse_condition(cond, {}, schema_, vars_, options), cond, {}});
  }

  void assume(const std::string& rest) {
    auto w = words(rest);
    if (w.empty()) throw Error("empty assume");
    if (w[0] != "forall-features" && w[0] != "forall") {
      add_assume(rest, options_);
      return;
    }
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw Error("loop needs ':' before the condition");
    auto head = words(rest.substr(0, colon));
    std::string cond = trim(rest.substr(colon + 1));
    std::vector<std::size_t> indices;
    std::string loop_var;
    if (head[0] == "forall-features") {
      if (head.size() != 2 && !(head.size() == 4 && head[2] == "except")) {
        throw Error("expected 'forall-features <i> [except <s>]:'");
      }
      loop_var = head[1];
      std::optional<std::size_t> skip;
      if (head.size() == 4) {
        Rational s = scalar_literal(head[3]);
        if (!is_integer(s) || s < 0 || s >= static_cast<long>(schema_.f_size())) {
          throw Error("'except' feature out of range");
        }
        skip = static_cast<std::size_t>(to_int64(s));
      }
      for (std::size_t i = 0; i < schema_.f_size(); ++i) {
        if (i != skip) indices.push_back(i);
      }
    } else {
      if (head.size() != 4 || head[2] != "in") throw Error("expected 'forall <i> in <vector>:'");
      loop_var = head[1];
      auto it = options_.bindings.find(head[3]);
      if (it == options_.bindings.end()) throw Error("unknown vector '" + head[3] + "'");
      std::vector<Rational> items;
      if (auto* r = std::get_if<Rational>(&it->second)) {
        items.push_back(*r);
      } else {
        items = std::get<std::vector<Rational>>(it->second);
      }
      for (const auto& r : items) {
        if (!is_integer(r) || r < 0) throw Error("loop vector must hold feature indices");
        indices.push_back(static_cast<std::size_t>(to_int64(r)));
      }
    }
    for (auto i : indices) {
      ParseOptions iteration = options_;
      iteration.bindings[loop_var] = Rational(static_cast<long>(i));
      add_assume(cond, iteration);
    }
  }

  const DatasetSchema& schema_;
  std::string name_ = "property";
  std::vector<std::string> vars_;
  ParseOptions options_;
  std::vector<AssumeClause> assumes_;
  std::optional<AssertClause> assertion_;
};

std::size_t feature_from_json(const nlohmann::json& j, const DatasetSchema& schema) {
  if (j.is_string()) {
    if (auto f = schema.feature_index(j.get<std::string>())) return *f;
    throw PropertyError("unknown feature '" + j.get<std::string>() + "'");
  }
  if (j.is_number_integer() && j.get<long>() >= 0) return j.get<std::size_t>();
  throw PropertyError("feature reference must be a name or index");
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) {
    // the shortest decimal form, so 0.1 stays 1/10
    try {
      return parse_rational(j.dump());
    } catch (const Error&) {
      return from_double(j.get<double>());
    }
  }
  throw PropertyError("expected a number");
}

}  // namespace

PropertySpec parse_property_file(std::string_view text, const DatasetSchema& schema) {
  return FileParser(schema).parse(text);
}

PropertySpec parse_trojan_file(std::string_view json_text, const DatasetSchema& schema) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw PropertyError(std::string("malformed trojan file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("features") || !doc.contains("trigger") || !doc.contains("target")) {
    throw PropertyError("trojan file needs 'features', 'trigger' and 'target'");
  }
  std::vector<std::size_t> features;
  for (const auto& f : doc["features"]) features.push_back(feature_from_json(f, schema));
  Instance trigger;
  for (const auto& v : doc["trigger"]) trigger.values.push_back(rational_from_json(v));
  Prediction target;
  if (doc["target"].is_array()) {
    for (const auto& c : doc["target"]) target.classes.push_back(c.get<std::int64_t>());
  } else {
    target.classes.push_back(doc["target"].get<std::int64_t>());
  }
  return trojan_property(schema, features, trigger, target);
}

PropertySpec load_property(std::string_view selector, const DatasetSchema& schema,
                           const std::filesystem::path& base_dir) {
  auto resolve = [&](std::string_view p) {
    std::filesystem::path path{std::string(p)};
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  if (selector.rfind("fairness:", 0) == 0) {
    auto arg = selector.substr(9);
    if (arg.rfind("s=", 0) != 0) throw PropertyError("expected fairness:s=<feature>");
    std::string name{arg.substr(2)};
    if (auto f = schema.feature_index(name)) return fairness_property(schema, *f);
    Rational index;
    try {
      index = parse_rational(name);
    } catch (const Error&) {
      throw PropertyError("unknown sensitive feature '" + name + "'");
    }
    if (!is_integer(index) || index < 0) throw PropertyError("bad sensitive feature '" + name + "'");
    return fairness_property(schema, static_cast<std::size_t>(to_int64(index)));
  }
  if (selector.rfind("concept:", 0) == 0) return concept_property(schema, selector.substr(8));
  if (selector.rfind("trojan:", 0) == 0) return parse_trojan_file(read_file(resolve(selector.substr(7))), schema);
  return parse_property_file(read_file(resolve(selector)), schema);
}

}  // namespace mlcheck
