#include "mlcheck/schema.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "mlcheck/error.hpp"

namespace mlcheck {
namespace {

namespace pt = boost::property_tree;

constexpr std::int64_t kContinuousSteps = 1'000'000;

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      items.push_back(current);
      current.clear();
    } else if (c != ' ' && c != '\t') {
      current.push_back(c);
    }
  }
  items.push_back(current);
  return items;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
  try {
    Rational r = parse_rational(text);
    if (is_integer(r)) return to_int64(r);
  } catch (const Error&) {
  }
  return std::nullopt;
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto ok_first = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  if (!ok_first(name.front())) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string fmt_list(const std::vector<std::int64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::categorical:
      return "categorical";
    case FeatureKind::integer:
      return "integer";
    case FeatureKind::continuous:
      return "continuous";
  }
  return "continuous";
}

bool LabelSpec::has_class(std::int64_t code) const {
  return std::find(classes.begin(), classes.end(), code) != classes.end();
}

DatasetSchema::DatasetSchema(std::vector<FeatureSpec> features, std::vector<LabelSpec> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.empty()) throw SchemaError("schema declares no features");
  if (labels_.empty()) throw SchemaError("schema declares no labels");
  std::set<std::string> names;
  for (auto& f : features_) {
    if (!is_identifier(f.name)) throw SchemaError("feature name '" + f.name + "' is not an identifier");
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature name '" + f.name + "'");
    if (f.min > f.max) {
      throw SchemaError("feature '" + f.name + "': min " + to_string(f.min) + " > max " + to_string(f.max));
    }
    if (f.kind == FeatureKind::categorical) {
      std::sort(f.categories.begin(), f.categories.end());
      if (std::adjacent_find(f.categories.begin(), f.categories.end()) != f.categories.end()) {
        throw SchemaError("feature '" + f.name + "': duplicate category code");
      }
      if (f.categories.size() < 2) throw SchemaError("feature '" + f.name + "': needs at least 2 categories");
      for (auto c : f.categories) {
        if (Rational(c) < f.min || Rational(c) > f.max) {
          throw SchemaError("feature '" + f.name + "': category " + std::to_string(c) + " outside [min, max]");
        }
      }
    } else if (!f.categories.empty()) {
      throw SchemaError("feature '" + f.name + "': categories given for a non-categorical feature");
    }
    if (f.kind == FeatureKind::integer && ceil(f.min) > floor(f.max)) {
      throw SchemaError("feature '" + f.name + "': integer range contains no integer");
    }
  }
  std::set<std::string> label_names;
  for (const auto& l : labels_) {
    if (!is_identifier(l.name)) throw SchemaError("label name '" + l.name + "' is not an identifier");
    if (!label_names.insert(l.name).second) throw SchemaError("duplicate label name '" + l.name + "'");
    if (names.count(l.name)) throw SchemaError("label '" + l.name + "' clashes with a feature name");
    if (l.classes.size() < 2) throw SchemaError("label '" + l.name + "': needs at least 2 classes");
    auto sorted = l.classes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw SchemaError("label '" + l.name + "': duplicate class code");
    }
    if (labels_.size() > 1 && sorted != std::vector<std::int64_t>{0, 1}) {
      throw SchemaError("label '" + l.name + "': multilabel schemas need boolean classes 0,1");
    }
  }
}

std::optional<std::size_t> DatasetSchema::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> DatasetSchema::label_index(std::string_view name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].name == name) return i;
  }
  return std::nullopt;
}

bool DatasetSchema::fully_discrete() const {
  return std::all_of(features_.begin(), features_.end(), [](const FeatureSpec& f) { return f.discrete(); });
}

bool operator==(const DatasetSchema& a, const DatasetSchema& b) {
  if (a.features_.size() != b.features_.size() || a.labels_.size() != b.labels_.size()) return false;
  for (std::size_t i = 0; i < a.features_.size(); ++i) {
    const auto& x = a.features_[i];
    const auto& y = b.features_[i];
    if (x.name != y.name || x.kind != y.kind || x.min != y.min || x.max != y.max ||
        x.categories != y.categories) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.labels_.size(); ++i) {
    const auto& x = a.labels_[i];
    const auto& y = b.labels_[i];
    if (x.name != y.name || x.classes != y.classes || x.class_names != y.class_names) return false;
  }
  return true;
}

DatasetSchema parse_schema(std::string_view xml_text) {
  pt::ptree doc;
  try {
    std::istringstream in{std::string(xml_text)};
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw SchemaError("malformed XML: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  auto root_it = doc.find("schema");
  if (root_it == doc.not_found() || doc.size() != 1) {
    throw SchemaError("document root must be a single <schema> element");
  }
  std::vector<FeatureSpec> features;
  std::vector<LabelSpec> labels;
  std::size_t feature_pos = 0;
  std::size_t label_pos = 0;
  std::set<std::string> seen_names;
  for (const auto& [tag, node] : root_it->second) {
    if (tag == "<xmlattr>") throw SchemaError("schema: <schema> takes no attributes");
    std::string path;
    if (tag == "feature") {
      path = "schema/feature[" + std::to_string(++feature_pos) + "]";
    } else if (tag == "label") {
      path = "schema/label[" + std::to_string(++label_pos) + "]";
    } else {
      throw SchemaError("schema: unexpected element <" + tag + ">");
    }
    std::map<std::string, std::string> attrs;
    if (auto a = node.get_child_optional("<xmlattr>")) {
      for (const auto& [key, value] : *a) attrs[key] = value.data();
    }
    for (const auto& [child, unused] : node) {
      if (child != "<xmlattr>") throw SchemaError(path + ": unexpected child element <" + child + ">");
    }
    auto take = [&](const std::string& key) -> std::optional<std::string> {
      auto it = attrs.find(key);
      if (it == attrs.end()) return std::nullopt;
      auto value = it->second;
      attrs.erase(it);
      return value;
    };
    auto name = take("name");
    if (!name) throw SchemaError(path + ": missing name attribute");
    path += "[@name='" + *name + "']";
    if (!seen_names.insert(*name).second) throw SchemaError(path + ": duplicate name '" + *name + "'");
    auto rational_attr = [&](const std::string& key) -> std::optional<Rational> {
      auto text = take(key);
      if (!text) return std::nullopt;
      try {
        return parse_rational(*text);
      } catch (const Error&) {
        throw SchemaError(path + ": attribute " + key + "='" + *text + "' is not a number");
      }
    };

    if (tag == "feature") {
      FeatureSpec f;
      f.name = *name;
      if (auto kind = take("kind")) {
        if (*kind == "categorical") {
          f.kind = FeatureKind::categorical;
        } else if (*kind == "integer") {
          f.kind = FeatureKind::integer;
        } else if (*kind == "continuous") {
          f.kind = FeatureKind::continuous;
        } else {
          throw SchemaError(path + ": unknown kind '" + *kind + "'");
        }
      }
      auto min = rational_attr("min");
      auto max = rational_attr("max");
      if (auto cats = take("categories")) {
        for (const auto& item : split_list(*cats)) {
          auto code = parse_int(item);
          if (!code) throw SchemaError(path + ": category '" + item + "' is not an integer code");
          f.categories.push_back(*code);
        }
      }
      if (f.kind == FeatureKind::categorical && !f.categories.empty()) {
        auto [lo, hi] = std::minmax_element(f.categories.begin(), f.categories.end());
        f.min = min.value_or(Rational(*lo));
        f.max = max.value_or(Rational(*hi));
      } else {
        f.min = min.value_or(Rational(0));
        f.max = max.value_or(Rational(1));
      }
      if (!attrs.empty()) throw SchemaError(path + ": unknown attribute '" + attrs.begin()->first + "'");
      if (f.min > f.max) {
        throw SchemaError(path + ": range error, min " + to_string(f.min) + " > max " + to_string(f.max));
      }
      features.push_back(std::move(f));
    } else {
      LabelSpec l;
      l.name = *name;
      auto classes = take("classes");
      if (!classes) throw SchemaError(path + ": missing classes attribute");
      auto items = split_list(*classes);
      bool numeric = std::all_of(items.begin(), items.end(), [](const std::string& s) { return parse_int(s).has_value(); });
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].empty()) throw SchemaError(path + ": empty class entry");
        if (numeric) {
          l.classes.push_back(*parse_int(items[i]));
        } else {
          l.classes.push_back(static_cast<std::int64_t>(i));
          l.class_names.push_back(items[i]);
        }
      }
      if (!attrs.empty()) throw SchemaError(path + ": unknown attribute '" + attrs.begin()->first + "'");
      if (l.classes.size() < 2) throw SchemaError(path + ": label needs at least 2 classes");
      labels.push_back(std::move(l));
    }
  }
  return DatasetSchema(std::move(features), std::move(labels));
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_schema(buffer.str());
}

std::string to_xml(const DatasetSchema& schema) {
  std::ostringstream out;
  out << "<schema>\n";
  for (const auto& f : schema.features()) {
    out << "  <feature name=\"" << f.name << "\" kind=\"" << to_string(f.kind) << "\" min=\"" << to_string(f.min)
        << "\" max=\"" << to_string(f.max) << "\"";
    if (f.kind == FeatureKind::categorical) out << " categories=\"" << fmt_list(f.categories) << "\"";
    out << "/>\n";
  }
  for (const auto& l : schema.labels()) {
    out << "  <label name=\"" << l.name << "\" classes=\"";
    if (!l.class_names.empty()) {
      for (std::size_t i = 0; i < l.class_names.size(); ++i) out << (i ? "," : "") << l.class_names[i];
    } else {
      out << fmt_list(l.classes);
    }
    out << "\"/>\n";
  }
  out << "</schema>\n";
  return out.str();
}

Rational random_value(const FeatureSpec& f, Rng& rng) {
  switch (f.kind) {
    case FeatureKind::categorical: {
      std::uniform_int_distribution<std::size_t> pick(0, f.categories.size() - 1);
      return Rational(f.categories[pick(rng)]);
    }
    case FeatureKind::integer: {
      std::uniform_int_distribution<std::int64_t> pick(to_int64(ceil(f.min)), to_int64(floor(f.max)));
      return Rational(pick(rng));
    }
    case FeatureKind::continuous: {
      std::uniform_int_distribution<std::int64_t> pick(0, kContinuousSteps);
      Rational v = f.min + (f.max - f.min) * Rational(pick(rng), kContinuousSteps);
      v.canonicalize();
      return v;
    }
  }
  return f.min;
}

Instance random_instance(const DatasetSchema& schema, Rng& rng) {
  Instance x;
  x.values.reserve(schema.f_size());
  for (const auto& f : schema.features()) x.values.push_back(random_value(f, rng));
  return x;
}

std::vector<std::string> validate_instance(const DatasetSchema& schema, const Instance& x) {
  std::vector<std::string> violations;
  if (x.values.size() != schema.f_size()) {
    violations.push_back("length mismatch: expected " + std::to_string(schema.f_size()) + " values, got " +
                         std::to_string(x.values.size()));
    return violations;
  }
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const auto& f = schema.feature(i);
    const auto& v = x.values[i];
    if (v < f.min || v > f.max) {
      violations.push_back("feature '" + f.name + "': value " + to_string(v) + " outside [" + to_string(f.min) +
                           ", " + to_string(f.max) + "]");
    }
    if (f.kind == FeatureKind::integer && !is_integer(v)) {
      violations.push_back("feature '" + f.name + "': value " + to_string(v) + " is not an integer");
    }
    if (f.kind == FeatureKind::categorical) {
      bool member = is_integer(v) && std::binary_search(f.categories.begin(), f.categories.end(), to_int64(v));
      if (!member) violations.push_back("feature '" + f.name + "': value " + to_string(v) + " is not a category code");
    }
  }
  return violations;
}

std::vector<std::string> validate_prediction(const DatasetSchema& schema, const Prediction& z) {
  std::vector<std::string> violations;
  if (z.classes.size() != schema.l_size()) {
    violations.push_back("length mismatch: expected " + std::to_string(schema.l_size()) + " classes, got " +
                         std::to_string(z.classes.size()));
    return violations;
  }
  for (std::size_t i = 0; i < z.classes.size(); ++i) {
    if (!schema.label(i).has_class(z.classes[i])) {
      violations.push_back("label '" + schema.label(i).name + "': " + std::to_string(z.classes[i]) +
                           " is not a class code");
    }
  }
  return violations;
}

std::vector<Rational> feature_domain(const FeatureSpec& feature) {
  std::vector<Rational> domain;
  if (feature.kind == FeatureKind::categorical) {
    for (auto c : feature.categories) domain.emplace_back(c);
  } else if (feature.kind == FeatureKind::integer) {
    for (auto v = to_int64(ceil(feature.min)); v <= to_int64(floor(feature.max)); ++v) domain.emplace_back(v);
  } else {
    throw Error("feature '" + feature.name + "' is continuous and has no finite domain");
  }
  return domain;
}

Rational snap_value(const FeatureSpec& feature, const Rational& value) {
  Rational v = feature.discrete() ? round_decimal(value, 0) : round_decimal(value, 9);
  if (v < feature.min) v = feature.kind == FeatureKind::continuous ? feature.min : ceil(feature.min);
  if (v > feature.max) v = feature.kind == FeatureKind::continuous ? feature.max : floor(feature.max);
  return v;
}

Instance snap_instance(const DatasetSchema& schema, const Instance& x) {
  Instance out = x;
  for (std::size_t i = 0; i < out.values.size() && i < schema.f_size(); ++i) {
    out.values[i] = snap_value(schema.feature(i), out.values[i]);
  }
  return out;
}

}  // namespace mlcheck
