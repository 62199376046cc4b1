#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mlcheck/rational.hpp"

namespace mlcheck {

using Rng = std::mt19937_64;

enum class FeatureKind { categorical, integer, continuous };

std::string_view to_string(FeatureKind kind);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  Rational min = 0;
  Rational max = 1;
  /// Sorted category codes; only used by categorical features.
  std::vector<std::int64_t> categories;

  /// Integer-sorted in the SMT encoding (categorical and integer kinds).
  bool discrete() const { return kind != FeatureKind::continuous; }
};

struct LabelSpec {
  std::string name;
  std::vector<std::int64_t> classes;
  /// Original names when the document used string class labels; codes are
  /// then the declaration indices.
  std::vector<std::string> class_names;

  bool has_class(std::int64_t code) const;
};

struct Instance {
  std::vector<Rational> values;

  friend bool operator==(const Instance&, const Instance&) = default;
  friend bool operator<(const Instance& a, const Instance& b) { return a.values < b.values; }
};

struct Prediction {
  std::vector<std::int64_t> classes;

  friend bool operator==(const Prediction&, const Prediction&) = default;
  friend auto operator<=>(const Prediction&, const Prediction&) = default;
};

/// Feature and label layout of the input/output space. Immutable once built;
/// the constructor enforces every structural invariant and throws SchemaError.
class DatasetSchema {
 public:
  DatasetSchema(std::vector<FeatureSpec> features, std::vector<LabelSpec> labels);

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<LabelSpec>& labels() const { return labels_; }
  const FeatureSpec& feature(std::size_t i) const { return features_.at(i); }
  const LabelSpec& label(std::size_t i) const { return labels_.at(i); }

  std::size_t f_size() const { return features_.size(); }
  std::size_t l_size() const { return labels_.size(); }
  bool multilabel() const { return labels_.size() > 1; }

  std::optional<std::size_t> feature_index(std::string_view name) const;
  std::optional<std::size_t> label_index(std::string_view name) const;

  /// True when every feature is categorical or integer-valued.
  bool fully_discrete() const;

  friend bool operator==(const DatasetSchema& a, const DatasetSchema& b);

 private:
  std::vector<FeatureSpec> features_;
  std::vector<LabelSpec> labels_;
};

DatasetSchema parse_schema(std::string_view xml_text);
DatasetSchema load_schema(const std::filesystem::path& path);
std::string to_xml(const DatasetSchema& schema);

/// Continuous features are drawn from a grid of 10^6 equal steps over
/// [min, max], so every draw is an exact short decimal when the bounds are.
Instance random_instance(const DatasetSchema& schema, Rng& rng);
Rational random_value(const FeatureSpec& feature, Rng& rng);

/// Empty result means the instance is valid.
std::vector<std::string> validate_instance(const DatasetSchema& schema, const Instance& x);
std::vector<std::string> validate_prediction(const DatasetSchema& schema, const Prediction& z);

/// Every valid value of feature i when the feature is discrete.
std::vector<Rational> feature_domain(const FeatureSpec& feature);

/// Nudges a value onto the feature's domain: integers rounded, continuous
/// values rounded to 9 decimals, then clamped to [min, max].
Rational snap_value(const FeatureSpec& feature, const Rational& value);
Instance snap_instance(const DatasetSchema& schema, const Instance& x);

}  // namespace mlcheck
