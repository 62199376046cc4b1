#include "mlcheck/propdsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "mlcheck/error.hpp"

namespace mlcheck {

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

bool operator==(const ArithBinary& a, const ArithBinary& b) {
  return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}
bool operator==(const Not& a, const Not& b) { return *a.operand == *b.operand; }
bool operator==(const CondBinary& a, const CondBinary& b) {
  return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}
bool operator==(const Compare& a, const Compare& b) {
  return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}
bool operator==(const Arith& a, const Arith& b) { return a.node == b.node; }
bool operator==(const Cond& a, const Cond& b) { return a.node == b.node; }

namespace ast {
ArithPtr lit(Rational value) { return std::make_shared<const Arith>(Arith{Literal{std::move(value)}}); }
ArithPtr feature(std::string var, std::size_t index) {
  return std::make_shared<const Arith>(Arith{FeatureRef{std::move(var), index}});
}
ArithPtr predict(std::string var, std::size_t label) {
  return std::make_shared<const Arith>(Arith{PredictRef{std::move(var), label}});
}
ArithPtr binary(ArithOp op, ArithPtr lhs, ArithPtr rhs) {
  return std::make_shared<const Arith>(Arith{ArithBinary{op, std::move(lhs), std::move(rhs)}});
}
CondPtr boolean(bool value) { return std::make_shared<const Cond>(Cond{BoolLit{value}}); }
CondPtr negate(CondPtr operand) { return std::make_shared<const Cond>(Cond{Not{std::move(operand)}}); }
CondPtr binary(BoolOp op, CondPtr lhs, CondPtr rhs) {
  return std::make_shared<const Cond>(Cond{CondBinary{op, std::move(lhs), std::move(rhs)}});
}
CondPtr compare(CmpOp op, ArithPtr lhs, ArithPtr rhs) {
  return std::make_shared<const Cond>(Cond{Compare{op, std::move(lhs), std::move(rhs)}});
}
CondPtr conjunction(const std::vector<CondPtr>& parts) {
  if (parts.empty()) return boolean(true);
  CondPtr result = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) result = binary(BoolOp::conj, result, parts[i]);
  return result;
}
}  // namespace ast

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

namespace {

template <typename F>
void visit_arith(const Arith& a, F&& f) {
  f(a);
  if (auto* b = std::get_if<ArithBinary>(&a.node)) {
    visit_arith(*b->lhs, f);
    visit_arith(*b->rhs, f);
  }
}

template <typename F>
void visit_terms(const Cond& c, F&& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Not>) {
          visit_terms(*n.operand, f);
        } else if constexpr (std::is_same_v<T, CondBinary>) {
          visit_terms(*n.lhs, f);
          visit_terms(*n.rhs, f);
        } else if constexpr (std::is_same_v<T, Compare>) {
          visit_arith(*n.lhs, f);
          visit_arith(*n.rhs, f);
        }
      },
      c.node);
}

}  // namespace

bool has_predict_ref(const Cond& c) {
  bool found = false;
  visit_terms(c, [&](const Arith& a) { found |= std::holds_alternative<PredictRef>(a.node); });
  return found;
}

bool has_feature_ref(const Cond& c) {
  bool found = false;
  visit_terms(c, [&](const Arith& a) { found |= std::holds_alternative<FeatureRef>(a.node); });
  return found;
}

bool is_constant(const Arith& a) {
  bool constant = true;
  visit_arith(a, [&](const Arith& n) {
    constant &= !std::holds_alternative<FeatureRef>(n.node) && !std::holds_alternative<PredictRef>(n.node);
  });
  return constant;
}

Rational constant_value(const Arith& a) { return evaluate(a, Valuation{}); }

std::vector<std::string> referenced_vars(const Cond& c) {
  std::vector<std::string> vars;
  auto note = [&](const std::string& v) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  };
  visit_terms(c, [&](const Arith& a) {
    if (auto* f = std::get_if<FeatureRef>(&a.node)) note(f->var);
    if (auto* p = std::get_if<PredictRef>(&a.node)) note(p->var);
  });
  return vars;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::eq:
      return "==";
    case CmpOp::ne:
      return "!=";
    case CmpOp::lt:
      return "<";
    case CmpOp::le:
      return "<=";
    case CmpOp::gt:
      return ">";
    case CmpOp::ge:
      return ">=";
  }
  return "==";
}

namespace {

int precedence(const Arith& a) {
  if (auto* b = std::get_if<ArithBinary>(&a.node)) return b->op == ArithOp::mul ? 2 : 1;
  return 3;
}

}  // namespace

std::string to_string(const Arith& a) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return to_string(n.value);
        } else if constexpr (std::is_same_v<T, FeatureRef>) {
          return n.var + "[" + std::to_string(n.feature) + "]";
        } else if constexpr (std::is_same_v<T, PredictRef>) {
          return "predict(" + n.var + ")[" + std::to_string(n.label) + "]";
        } else {
          int p = n.op == ArithOp::mul ? 2 : 1;
          std::string lhs = to_string(*n.lhs);
          std::string rhs = to_string(*n.rhs);
          if (precedence(*n.lhs) < p) lhs = "(" + lhs + ")";
          if (precedence(*n.rhs) <= p) rhs = "(" + rhs + ")";
          const char* op = n.op == ArithOp::add ? " + " : n.op == ArithOp::sub ? " - " : " * ";
          return lhs + op + rhs;
        }
      },
      a.node);
}

std::string to_string(const Cond& c) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Not>) {
          return "(not " + to_string(*n.operand) + ")";
        } else if constexpr (std::is_same_v<T, CondBinary>) {
          const char* op = n.op == BoolOp::conj ? " and " : n.op == BoolOp::disj ? " or " : " => ";
          return "(" + to_string(*n.lhs) + op + to_string(*n.rhs) + ")";
        } else {
          return to_string(*n.lhs) + " " + std::string(to_string(n.op)) + " " + to_string(*n.rhs);
        }
      },
      c.node);
}

// ---------------------------------------------------------------------------
// Lexer and parser
// ---------------------------------------------------------------------------

namespace {

enum class Tok { ident, number, punct, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
  Rational number;
};

const std::set<std::string> kKeywords = {"and", "or", "not", "true", "false", "predict", "mut"};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      out.push_back({Tok::ident, std::string(text.substr(start, i - start)), start, 0});
      continue;
    }
    if (is_digit(c)) {
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      if (i + 1 < text.size() && text[i] == '/' && is_digit(text[i + 1])) {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      auto literal = text.substr(start, i - start);
      Rational value;
      try {
        value = parse_rational(literal);
      } catch (const Error& e) {
        throw ParseError(e.what(), start);
      }
      out.push_back({Tok::number, std::string(literal), start, value});
      continue;
    }
    static const char* two_char[] = {"==", "!=", "<=", ">=", "=>"};
    bool matched = false;
    for (const char* p : two_char) {
      if (text.substr(i, 2) == p) {
        out.push_back({Tok::punct, p, start, 0});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()[]+-*<>.,").find(c) != std::string_view::npos) {
      out.push_back({Tok::punct, std::string(1, c), start, 0});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({Tok::end, "", text.size(), 0});
  return out;
}

/// A parsed arithmetic term; vector terms come from whole-prediction
/// references on multilabel schemas and from vector-valued arguments.
struct Term {
  std::vector<ArithPtr> parts;
  bool vector = false;
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const std::vector<Value>& args, const DatasetSchema& schema,
         const std::vector<std::string>& vars, const ParseOptions& options)
      : tokens_(lex(text)), args_(args), schema_(schema), vars_(vars.begin(), vars.end()), options_(options) {
    for (const auto& v : vars) {
      if (kKeywords.count(v)) throw ParseError("instance variable '" + v + "' is a reserved word", 0);
    }
  }

  CondPtr parse() {
    CondPtr c = cond();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    if (next_arg_ != args_.size()) {
      throw ParseError("arity mismatch: condition has " + std::to_string(next_arg_) + " placeholder(s) but " +
                           std::to_string(args_.size()) + " argument(s) were supplied",
                       peek().pos);
    }
    return c;
  }

 private:
  struct State {
    std::size_t index;
    std::size_t next_arg;
    std::map<std::string, Value> placeholders;
  };

  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(i_ + ahead, tokens_.size() - 1)]; }
  const Token& advance() { return tokens_[i_ < tokens_.size() - 1 ? i_++ : i_]; }
  bool is_punct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::punct && peek(ahead).text == p;
  }
  bool is_word(const char* w) const { return peek().kind == Tok::ident && peek().text == w; }
  bool accept(const char* p) {
    if (is_punct(p)) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(const char* p) {
    if (!accept(p)) fail(std::string("expected '") + p + "'");
  }
  [[noreturn]] void fail(const std::string& message) const {
    std::string found = peek().kind == Tok::end ? "end of input" : "'" + peek().text + "'";
    throw ParseError(message + ", found " + found, peek().pos);
  }
  State save() const { return {i_, next_arg_, placeholders_}; }
  void restore(const State& s) {
    i_ = s.index;
    next_arg_ = s.next_arg;
    placeholders_ = s.placeholders;
  }

  CondPtr cond() { return implication(); }

  CondPtr implication() {
    CondPtr lhs = disjunction();
    if (accept("=>")) return ast::binary(BoolOp::implies, lhs, implication());
    return lhs;
  }

  CondPtr disjunction() {
    CondPtr lhs = conjunction_();
    while (is_word("or")) {
      advance();
      lhs = ast::binary(BoolOp::disj, lhs, conjunction_());
    }
    return lhs;
  }

  CondPtr conjunction_() {
    CondPtr lhs = negation();
    while (is_word("and")) {
      advance();
      lhs = ast::binary(BoolOp::conj, lhs, negation());
    }
    return lhs;
  }

  CondPtr negation() {
    if (is_word("not")) {
      advance();
      return ast::negate(negation());
    }
    return atom();
  }

  static bool continues_term(const Token& t) {
    if (t.kind != Tok::punct) return false;
    static const std::set<std::string> ops = {"+", "-", "*", "==", "!=", "<", "<=", ">", ">="};
    return ops.count(t.text) > 0;
  }

  CondPtr atom() {
    if (is_word("true")) {
      advance();
      return ast::boolean(true);
    }
    if (is_word("false")) {
      advance();
      return ast::boolean(false);
    }
    if (is_punct("(")) {
      // A parenthesis opens either a nested condition or an arithmetic
      // group; try the condition first and fall back.
      State start = save();
      std::optional<ParseError> first_error;
      try {
        advance();
        CondPtr inner = cond();
        expect(")");
        if (!continues_term(peek())) return inner;
      } catch (const ParseError& e) {
        first_error = e;
      }
      restore(start);
      try {
        return comparison();
      } catch (const ParseError& e) {
        if (first_error && first_error->position() > e.position()) throw *first_error;
        throw;
      }
    }
    return comparison();
  }

  static std::optional<CmpOp> cmp_op(const Token& t) {
    if (t.kind != Tok::punct) return std::nullopt;
    if (t.text == "==") return CmpOp::eq;
    if (t.text == "!=") return CmpOp::ne;
    if (t.text == "<") return CmpOp::lt;
    if (t.text == "<=") return CmpOp::le;
    if (t.text == ">") return CmpOp::gt;
    if (t.text == ">=") return CmpOp::ge;
    return std::nullopt;
  }

  CondPtr comparison() {
    Term lhs = arith();
    if (auto op = cmp_op(peek())) {
      std::size_t pos = peek().pos;
      advance();
      Term rhs = arith();
      return make_compare(*op, lhs, rhs, pos);
    }
    // Bare prediction reference used as a boolean: predict(x)[l] == 1.
    if (!lhs.vector && std::holds_alternative<PredictRef>(lhs.parts.front()->node)) {
      return ast::compare(CmpOp::eq, lhs.parts.front(), ast::lit(1));
    }
    fail("expected comparison operator");
  }

  CondPtr make_compare(CmpOp op, const Term& lhs, const Term& rhs, std::size_t pos) {
    if (!lhs.vector && !rhs.vector) return ast::compare(op, lhs.parts.front(), rhs.parts.front());
    if (!lhs.vector || !rhs.vector || lhs.parts.size() != rhs.parts.size()) {
      throw ParseError("vector comparison needs operands of equal length", pos);
    }
    if (op != CmpOp::eq && op != CmpOp::ne) throw ParseError("vectors can only be compared with == or !=", pos);
    std::vector<CondPtr> parts;
    for (std::size_t k = 0; k < lhs.parts.size(); ++k) {
      parts.push_back(ast::compare(CmpOp::eq, lhs.parts[k], rhs.parts[k]));
    }
    CondPtr all = ast::conjunction(parts);
    return op == CmpOp::eq ? all : ast::negate(all);
  }

  Term arith() {
    Term lhs = term();
    while (is_punct("+") || is_punct("-")) {
      std::size_t pos = peek().pos;
      ArithOp op = advance().text == "+" ? ArithOp::add : ArithOp::sub;
      Term rhs = term();
      lhs = combine(op, lhs, rhs, pos);
    }
    return lhs;
  }

  Term term() {
    Term lhs = factor();
    while (is_punct("*")) {
      std::size_t pos = peek().pos;
      advance();
      Term rhs = factor();
      lhs = combine(ArithOp::mul, lhs, rhs, pos);
    }
    return lhs;
  }

  Term combine(ArithOp op, const Term& lhs, const Term& rhs, std::size_t pos) {
    if (lhs.vector || rhs.vector) throw ParseError("arithmetic on a vector value", pos);
    if (op == ArithOp::mul && !is_constant(*lhs.parts.front()) && !is_constant(*rhs.parts.front())) {
      throw ParseError("nonlinear multiplication: one operand must be a literal", pos);
    }
    return scalar(ast::binary(op, lhs.parts.front(), rhs.parts.front()), lhs.pos);
  }

  static Term scalar(ArithPtr a, std::size_t pos) { return Term{{std::move(a)}, false, pos}; }

  Term from_value(const Value& v, std::size_t pos) {
    if (auto* r = std::get_if<Rational>(&v)) return scalar(ast::lit(*r), pos);
    const auto& vec = std::get<std::vector<Rational>>(v);
    if (vec.empty()) throw ParseError("empty vector argument", pos);
    if (vec.size() == 1) return scalar(ast::lit(vec.front()), pos);
    Term t{{}, true, pos};
    for (const auto& r : vec) t.parts.push_back(ast::lit(r));
    return t;
  }

  Term factor() {
    const Token& t = peek();
    std::size_t pos = t.pos;
    if (t.kind == Tok::number) {
      advance();
      return scalar(ast::lit(t.number), pos);
    }
    if (is_punct("-") && peek(1).kind == Tok::number) {
      advance();
      Rational v = -advance().number;
      return scalar(ast::lit(v), pos);
    }
    if (is_punct("(")) {
      advance();
      Term inner = arith();
      expect(")");
      return inner;
    }
    if (is_word("mut") || is_word("predict")) return prediction();
    if (t.kind != Tok::ident) fail("expected a term");
    std::string name = advance().text;
    if (kKeywords.count(name)) throw ParseError("unexpected keyword '" + name + "'", pos);
    if (is_punct("[")) {
      if (vars_.count(name)) {
        advance();
        std::size_t index = feature_key();
        expect("]");
        return scalar(ast::feature(name, index), pos);
      }
      Value v = value_of(name, pos);
      advance();
      std::size_t key_pos = peek().pos;
      std::size_t index = feature_key();
      expect("]");
      if (auto* vec = std::get_if<std::vector<Rational>>(&v)) {
        if (index >= vec->size()) throw ParseError("index " + std::to_string(index) + " out of range for '" + name + "'", key_pos);
        return scalar(ast::lit((*vec)[index]), pos);
      }
      throw ParseError("'" + name + "' is not a vector", pos);
    }
    if (vars_.count(name)) throw ParseError("instance variable '" + name + "' used without a feature key", pos);
    if (options_.bare_label_var && !options_.bindings.count(name)) {
      if (auto l = schema_.label_index(name)) return scalar(ast::predict(*options_.bare_label_var, *l), pos);
    }
    return from_value(value_of(name, pos), pos);
  }

  Term prediction() {
    std::size_t pos = peek().pos;
    if (is_word("mut")) {
      advance();
      expect(".");
      if (!is_word("predict")) fail("expected 'predict'");
    }
    advance();
    expect("(");
    if (peek().kind != Tok::ident || !vars_.count(peek().text)) fail("expected an instance variable");
    std::string var = advance().text;
    expect(")");
    if (accept("[")) {
      std::size_t label = label_key();
      expect("]");
      return scalar(ast::predict(var, label), pos);
    }
    if (schema_.l_size() == 1) return scalar(ast::predict(var, 0), pos);
    Term t{{}, true, pos};
    for (std::size_t l = 0; l < schema_.l_size(); ++l) t.parts.push_back(ast::predict(var, l));
    return t;
  }

  std::size_t index_from(const Value& v, std::size_t limit, const std::string& what, std::size_t pos) {
    const Rational* r = std::get_if<Rational>(&v);
    if (!r) {
      const auto& vec = std::get<std::vector<Rational>>(v);
      if (vec.size() == 1) r = &vec.front();
    }
    if (!r || !is_integer(*r) || *r < 0 || *r >= static_cast<long>(limit)) {
      throw ParseError(what + " index out of range", pos);
    }
    return static_cast<std::size_t>(to_int64(*r));
  }

  std::size_t feature_key() {
    const Token& t = peek();
    std::size_t pos = t.pos;
    if (t.kind == Tok::number) {
      advance();
      return index_from(t.number, schema_.f_size(), "feature", pos);
    }
    if (t.kind != Tok::ident) fail("expected a feature key");
    std::string name = advance().text;
    if (auto it = options_.bindings.find(name); it != options_.bindings.end()) {
      return index_from(it->second, schema_.f_size(), "feature", pos);
    }
    if (auto f = schema_.feature_index(name)) return *f;
    return index_from(placeholder(name, pos), schema_.f_size(), "feature", pos);
  }

  std::size_t label_key() {
    const Token& t = peek();
    std::size_t pos = t.pos;
    if (t.kind == Tok::number) {
      advance();
      return index_from(t.number, schema_.l_size(), "label", pos);
    }
    if (t.kind != Tok::ident) fail("expected a label key");
    std::string name = advance().text;
    if (auto it = options_.bindings.find(name); it != options_.bindings.end()) {
      return index_from(it->second, schema_.l_size(), "label", pos);
    }
    if (auto l = schema_.label_index(name)) return *l;
    if (schema_.feature_index(name)) throw ParseError("'" + name + "' is a feature, not a label", pos);
    if (next_arg_ >= args_.size() && !placeholders_.count(name)) {
      throw ParseError("unknown label '" + name + "'", pos);
    }
    return index_from(placeholder(name, pos), schema_.l_size(), "label", pos);
  }

  Value value_of(const std::string& name, std::size_t pos) {
    if (auto it = options_.bindings.find(name); it != options_.bindings.end()) return it->second;
    if (name == "f_size") return Rational(static_cast<long>(schema_.f_size()));
    if (name == "l_size") return Rational(static_cast<long>(schema_.l_size()));
    return placeholder(name, pos);
  }

  Value placeholder(const std::string& name, std::size_t pos) {
    if (auto it = placeholders_.find(name); it != placeholders_.end()) return it->second;
    if (next_arg_ >= args_.size()) {
      std::string what = schema_.feature_index(name) || schema_.label_index(name) ? "misplaced name" : "unknown identifier";
      throw ParseError(what + " '" + name + "' (no argument left to bind it)", pos);
    }
    Value v = args_[next_arg_++];
    placeholders_.emplace(name, v);
    return v;
  }

  std::vector<Token> tokens_;
  std::size_t i_ = 0;
  const std::vector<Value>& args_;
  const DatasetSchema& schema_;
  std::set<std::string> vars_;
  const ParseOptions& options_;
  std::size_t next_arg_ = 0;
  std::map<std::string, Value> placeholders_;
};

}  // namespace

CondPtr parse_condition(std::string_view text, const std::vector<Value>& args, const DatasetSchema& schema,
                        const std::vector<std::string>& instance_vars, const ParseOptions& options) {
  return Parser(text, args, schema, instance_vars, options).parse();
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

CondPtr PropertySpec::assume_conjunction() const {
  std::vector<CondPtr> parts;
  for (const auto& a : assumes) parts.push_back(a.ast);
  return ast::conjunction(parts);
}

std::size_t PropertySpec::var_index(std::string_view var) const {
  auto it = std::find(instance_vars.begin(), instance_vars.end(), var);
  if (it == instance_vars.end()) throw PropertyError("unknown instance variable '" + std::string(var) + "'");
  return static_cast<std::size_t>(it - instance_vars.begin());
}

PropertySpec build_property(std::vector<AssumeClause> assumes, AssertClause assertion, std::string name) {
  if (!assertion.ast) throw PropertyError("property has no assertion");
  if (!has_predict_ref(*assertion.ast)) {
    throw PropertyError("assertion '" + assertion.source + "' does not reference a prediction");
  }
  PropertySpec spec;
  spec.name = std::move(name);
  auto note = [&](const Cond& c) {
    for (auto& v : referenced_vars(c)) {
      if (std::find(spec.instance_vars.begin(), spec.instance_vars.end(), v) == spec.instance_vars.end()) {
        spec.instance_vars.push_back(v);
      }
    }
  };
  for (const auto& a : assumes) {
    if (!a.ast) throw PropertyError("empty assume clause");
    if (has_predict_ref(*a.ast)) throw PropertyError("assume clause '" + a.source + "' references a prediction");
    note(*a.ast);
  }
  note(*assertion.ast);
  spec.assumes = std::move(assumes);
  spec.assertion = std::move(assertion);
  return spec;
}

PropertySpec fairness_property(const DatasetSchema& schema, std::size_t sensitive) {
  if (sensitive >= schema.f_size()) throw PropertyError("sensitive feature index out of range");
  if (schema.multilabel()) throw PropertyError("fairness needs a single-label schema");
  const std::vector<std::string> vars = {"x", "y"};
  std::vector<AssumeClause> assumes;
  for (std::size_t i = 0; i < schema.f_size(); ++i) {
    std::string text = i == sensitive ? "x[i] != y[i]" : "x[i] == y[i]";
    std::vector<Value> args = {Rational(static_cast<long>(i))};
    assumes.push_back({parse_condition(text, args, schema, vars), text, args});
  }
  std::string assert_text = "mut.predict(x) == mut.predict(y)";
  AssertClause assertion{parse_condition(assert_text, {}, schema, vars), assert_text, {}};
  return build_property(std::move(assumes), std::move(assertion),
                        "fairness:s=" + schema.feature(sensitive).name);
}

namespace {

void check_label_refs(const Arith& a, const DatasetSchema& schema) {
  if (const auto* p = std::get_if<PredictRef>(&a.node)) {
    if (p->label >= schema.l_size()) throw PropertyError("label index " + std::to_string(p->label) + " out of range");
  } else if (const auto* b = std::get_if<ArithBinary>(&a.node)) {
    check_label_refs(*b->lhs, schema);
    check_label_refs(*b->rhs, schema);
  }
}

void check_label_refs(const Cond& c, const DatasetSchema& schema) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Not>) {
          check_label_refs(*n.operand, schema);
        } else if constexpr (std::is_same_v<T, CondBinary>) {
          check_label_refs(*n.lhs, schema);
          check_label_refs(*n.rhs, schema);
        } else if constexpr (std::is_same_v<T, Compare>) {
          check_label_refs(*n.lhs, schema);
          check_label_refs(*n.rhs, schema);
        }
      },
      c.node);
}

}  // namespace

PropertySpec concept_property(const DatasetSchema& schema, CondPtr phi, std::string source) {
  if (!phi) throw PropertyError("empty concept formula");
  if (has_feature_ref(*phi)) throw PropertyError("concept formula references features");
  auto vars = referenced_vars(*phi);
  if (vars.size() > 1) throw PropertyError("concept formula must mention exactly one instance variable");
  if (source.empty()) source = to_string(*phi);
  // A formula without any label (e.g. `true`) still needs an instance
  // variable so the property has one surrogate copy.
  if (vars.empty()) {
    phi = ast::binary(BoolOp::conj, phi,
                      ast::compare(CmpOp::eq, ast::predict("x", 0), ast::predict("x", 0)));
  }
  AssumeClause trivially{ast::boolean(true), "true", {}};
  check_label_refs(*phi, schema);
  return build_property({trivially}, AssertClause{phi, source, {}}, "concept:" + source);
}

PropertySpec concept_property(const DatasetSchema& schema, std::string_view phi_text) {
  ParseOptions options;
  options.bare_label_var = "x";
  CondPtr phi = parse_condition(phi_text, {}, schema, {"x"}, options);
  return concept_property(schema, phi, std::string(phi_text));
}

PropertySpec trojan_property(const DatasetSchema& schema, std::vector<std::size_t> trigger_features,
                             const Instance& trigger, const Prediction& target) {
  if (trigger_features.empty()) throw PropertyError("trigger feature set is empty");
  std::sort(trigger_features.begin(), trigger_features.end());
  trigger_features.erase(std::unique(trigger_features.begin(), trigger_features.end()), trigger_features.end());
  if (trigger_features.back() >= schema.f_size()) throw PropertyError("trigger feature index out of range");
  auto bad_t = validate_instance(schema, trigger);
  if (!bad_t.empty()) throw PropertyError("invalid trigger vector: " + bad_t.front());
  auto bad_z = validate_prediction(schema, target);
  if (!bad_z.empty()) throw PropertyError("invalid target prediction: " + bad_z.front());

  const std::vector<std::string> vars = {"x"};
  std::vector<AssumeClause> assumes;
  for (auto f : trigger_features) {
    // Placeholders bind by first occurrence: f, then t.
    std::string text = "x[f] == t[f]";
    std::vector<Value> args = {Rational(static_cast<long>(f)), trigger.values};
    assumes.push_back({parse_condition(text, args, schema, vars), text, args});
  }
  std::vector<Rational> z;
  for (auto c : target.classes) z.emplace_back(c);
  std::string assert_text = "mut.predict(x) == z";
  std::vector<Value> assert_args = {z};
  AssertClause assertion{parse_condition(assert_text, assert_args, schema, vars), assert_text, assert_args};
  std::string name = "trojan:T=";
  for (std::size_t k = 0; k < trigger_features.size(); ++k) name += (k ? "," : "") + std::to_string(trigger_features[k]);
  return build_property(std::move(assumes), std::move(assertion), name);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Rational evaluate(const Arith& a, const Valuation& v) {
  return std::visit(
      [&](const auto& n) -> Rational {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, FeatureRef>) {
          auto it = v.instances.find(n.var);
          if (it == v.instances.end()) throw Error("no instance bound to '" + n.var + "'");
          return it->second.values.at(n.feature);
        } else if constexpr (std::is_same_v<T, PredictRef>) {
          auto it = v.predictions.find(n.var);
          if (it == v.predictions.end()) throw Error("no prediction bound to '" + n.var + "'");
          return Rational(static_cast<long>(it->second.classes.at(n.label)));
        } else {
          Rational l = evaluate(*n.lhs, v);
          Rational r = evaluate(*n.rhs, v);
          switch (n.op) {
            case ArithOp::add:
              return l + r;
            case ArithOp::sub:
              return l - r;
            case ArithOp::mul:
              return l * r;
          }
          return l;
        }
      },
      a.node);
}

bool evaluate(const Cond& c, const Valuation& v) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, BoolLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Not>) {
          return !evaluate(*n.operand, v);
        } else if constexpr (std::is_same_v<T, CondBinary>) {
          switch (n.op) {
            case BoolOp::conj:
              return evaluate(*n.lhs, v) && evaluate(*n.rhs, v);
            case BoolOp::disj:
              return evaluate(*n.lhs, v) || evaluate(*n.rhs, v);
            case BoolOp::implies:
              return !evaluate(*n.lhs, v) || evaluate(*n.rhs, v);
          }
          return false;
        } else {
          Rational l = evaluate(*n.lhs, v);
          Rational r = evaluate(*n.rhs, v);
          switch (n.op) {
            case CmpOp::eq:
              return l == r;
            case CmpOp::ne:
              return l != r;
            case CmpOp::lt:
              return l < r;
            case CmpOp::le:
              return l <= r;
            case CmpOp::gt:
              return l > r;
            case CmpOp::ge:
              return l >= r;
          }
          return false;
        }
      },
      c.node);
}

}  // namespace mlcheck
