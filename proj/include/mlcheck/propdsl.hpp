#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlcheck/rational.hpp"
#include "mlcheck/schema.hpp"

namespace mlcheck {

// ---------------------------------------------------------------------------
// Condition AST
//
// Arithmetic terms are rationals, feature references x[i] and per-label
// prediction references predict(x)[l]. Conditions combine comparisons with
// boolean connectives. Every reference is resolved to indices at parse time;
// instance variables stay symbolic so clauses can be re-targeted to copies.
// ---------------------------------------------------------------------------

enum class CmpOp { eq, ne, lt, le, gt, ge };
enum class ArithOp { add, sub, mul };
enum class BoolOp { conj, disj, implies };

struct Arith;
struct Cond;
using ArithPtr = std::shared_ptr<const Arith>;
using CondPtr = std::shared_ptr<const Cond>;

struct Literal {
  Rational value;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct FeatureRef {
  std::string var;
  std::size_t feature = 0;
  friend bool operator==(const FeatureRef&, const FeatureRef&) = default;
};

struct PredictRef {
  std::string var;
  std::size_t label = 0;
  friend bool operator==(const PredictRef&, const PredictRef&) = default;
};

struct ArithBinary {
  ArithOp op;
  ArithPtr lhs;
  ArithPtr rhs;
};

struct Arith {
  std::variant<Literal, FeatureRef, PredictRef, ArithBinary> node;
};

struct BoolLit {
  bool value = true;
  friend bool operator==(const BoolLit&, const BoolLit&) = default;
};

struct Not {
  CondPtr operand;
};

struct CondBinary {
  BoolOp op;
  CondPtr lhs;
  CondPtr rhs;
};

struct Compare {
  CmpOp op;
  ArithPtr lhs;
  ArithPtr rhs;
};

struct Cond {
  std::variant<BoolLit, Not, CondBinary, Compare> node;
};

bool operator==(const Arith& a, const Arith& b);
bool operator==(const Cond& a, const Cond& b);
bool operator==(const ArithBinary& a, const ArithBinary& b);
bool operator==(const Not& a, const Not& b);
bool operator==(const CondBinary& a, const CondBinary& b);
bool operator==(const Compare& a, const Compare& b);

namespace ast {
ArithPtr lit(Rational value);
ArithPtr feature(std::string var, std::size_t index);
ArithPtr predict(std::string var, std::size_t label);
ArithPtr binary(ArithOp op, ArithPtr lhs, ArithPtr rhs);
CondPtr boolean(bool value);
CondPtr negate(CondPtr operand);
CondPtr binary(BoolOp op, CondPtr lhs, CondPtr rhs);
CondPtr compare(CmpOp op, ArithPtr lhs, ArithPtr rhs);
/// Left-nested conjunction; `true` for an empty list.
CondPtr conjunction(const std::vector<CondPtr>& parts);
}  // namespace ast

bool has_predict_ref(const Cond& c);
bool has_feature_ref(const Cond& c);
/// True when the term contains no feature or prediction reference.
bool is_constant(const Arith& a);
Rational constant_value(const Arith& a);
/// Instance variables in first-occurrence (left-to-right) order.
std::vector<std::string> referenced_vars(const Cond& c);

/// Re-parseable text. Feature and label keys are printed as indices.
std::string to_string(const Cond& c);
std::string to_string(const Arith& a);
std::string_view to_string(CmpOp op);

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// A placeholder argument: a scalar, or a vector such as a trigger or target.
/// Vectors of length one behave as scalars.
using Value = std::variant<Rational, std::vector<Rational>>;

struct ParseOptions {
  /// Named values (property-file `let` bindings and loop variables). These
  /// take precedence over positional placeholders.
  std::map<std::string, Value> bindings;
  /// When set, bare label names are read as predict(<var>)[label].
  std::optional<std::string> bare_label_var;
};

/// Parses a condition string. Identifiers that are neither instance
/// variables, schema names nor bindings are placeholders; the i-th distinct
/// placeholder (by first occurrence) takes args[i].
CondPtr parse_condition(std::string_view text, const std::vector<Value>& args, const DatasetSchema& schema,
                        const std::vector<std::string>& instance_vars, const ParseOptions& options = {});

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

struct AssumeClause {
  CondPtr ast;
  std::string source;
  std::vector<Value> args;
};

struct AssertClause {
  CondPtr ast;
  std::string source;
  std::vector<Value> args;
};

struct PropertySpec {
  std::string name;
  std::vector<AssumeClause> assumes;
  AssertClause assertion;
  std::vector<std::string> instance_vars;

  CondPtr assume_conjunction() const;
  std::size_t var_index(std::string_view var) const;
};

PropertySpec build_property(std::vector<AssumeClause> assumes, AssertClause assertion, std::string name = "property");

/// Individual fairness w.r.t. sensitive feature s over instance vars x, y.
PropertySpec fairness_property(const DatasetSchema& schema, std::size_t sensitive);

/// Concept relationship: assume true, assert phi over one instance var.
PropertySpec concept_property(const DatasetSchema& schema, CondPtr phi, std::string source = {});
/// Parses phi with bare label names, e.g. "dog => not cat".
PropertySpec concept_property(const DatasetSchema& schema, std::string_view phi_text);

/// Trojan attack (T, t, z): x_f = t_f for f in T implies M(x) = z.
PropertySpec trojan_property(const DatasetSchema& schema, std::vector<std::size_t> trigger_features,
                             const Instance& trigger, const Prediction& target);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Concrete instances (and optionally predictions) for each instance var.
struct Valuation {
  std::map<std::string, Instance> instances;
  std::map<std::string, Prediction> predictions;
};

Rational evaluate(const Arith& a, const Valuation& v);
bool evaluate(const Cond& c, const Valuation& v);

}  // namespace mlcheck
