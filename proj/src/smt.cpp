#include "mlcheck/smt.hpp"

#include <cstdlib>
#include <sstream>

#include "mlcheck/error.hpp"
#include "mlcheck/sexpr.hpp"

namespace mlcheck {

namespace smtvar {
std::string feature(std::size_t i, std::size_t copy) {
  return "f_" + std::to_string(i) + "_" + std::to_string(copy);
}
std::string label(std::size_t l, std::size_t copy) {
  return "class_" + std::to_string(l) + "_" + std::to_string(copy);
}
std::string node(std::size_t level, std::size_t index, std::size_t copy) {
  return "s_" + std::to_string(index) + "_" + std::to_string(level) + "_" + std::to_string(copy);
}
std::string neuron_in(std::size_t layer, std::size_t i, std::size_t copy) {
  return "in_" + std::to_string(layer) + "_" + std::to_string(i) + "_" + std::to_string(copy);
}
std::string neuron_out(std::size_t layer, std::size_t i, std::size_t copy) {
  return "out_" + std::to_string(layer) + "_" + std::to_string(i) + "_" + std::to_string(copy);
}
}  // namespace smtvar

std::string real_literal(const Rational& v) {
  Rational a = abs(v);
  std::string body;
  if (a.get_den() == 1) {
    body = a.get_num().get_str() + ".0";
  } else {
    body = "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
  }
  return v < 0 ? "(- " + body + ")" : body;
}

std::string int_literal(const Rational& v) {
  if (v.get_den() != 1) throw Error("integer literal expected, got " + to_string(v));
  std::string body = Rational(abs(v)).get_num().get_str();
  return v < 0 ? "(- " + body + ")" : body;
}

std::string weight_literal(const Rational& w) {
  Rational k = w * 1000;
  if (k.get_den() != 1) return real_literal(w);
  std::string body = "(/ " + Rational(abs(k)).get_num().get_str() + ".0 1000.0)";
  return w < 0 ? "(- " + body + ")" : body;
}

void Fragment::append(const Fragment& other) {
  declarations.insert(declarations.end(), other.declarations.begin(), other.declarations.end());
  assertions.insert(assertions.end(), other.assertions.begin(), other.assertions.end());
}

void SmtScript::add(const Fragment& f) {
  declarations.insert(declarations.end(), f.declarations.begin(), f.declarations.end());
  assertions.insert(assertions.end(), f.assertions.begin(), f.assertions.end());
}

std::vector<std::string> SmtScript::query_vars() const {
  std::vector<std::string> vars;
  for (std::size_t c = 1; c <= copies; ++c) {
    for (std::size_t i = 0; i < features; ++i) vars.push_back(smtvar::feature(i, c));
    for (std::size_t l = 0; l < labels; ++l) vars.push_back(smtvar::label(l, c));
  }
  return vars;
}

std::string SmtScript::body() const {
  std::string out = "(set-logic " + logic + ")\n";
  for (const auto& d : declarations) out += d + "\n";
  for (const auto& a : assertions) out += "(assert " + a + ")\n";
  return out;
}

namespace {

std::string query_text(const std::vector<std::string>& vars) {
  std::string out = "(check-sat)\n";
  if (!vars.empty()) {
    out += "(get-value (";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) out += ' ';
      out += vars[i];
    }
    out += "))\n";
  }
  return out;
}

std::vector<std::string> all_vars(const SmtScript& script, const std::vector<std::string>& extra_vars) {
  auto vars = script.query_vars();
  vars.insert(vars.end(), extra_vars.begin(), extra_vars.end());
  return vars;
}

}  // namespace

std::string SmtScript::text() const { return body() + query_text(query_vars()); }

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

namespace {

enum class Sort { integer, real };

struct Term {
  std::string text;
  Sort sort = Sort::integer;
  std::optional<Rational> constant;
};

Sort feature_sort(const FeatureSpec& f) { return f.discrete() ? Sort::integer : Sort::real; }

std::string sort_name(Sort s) { return s == Sort::integer ? "Int" : "Real"; }

Term constant_term(const Rational& v) {
  if (is_integer(v)) return {int_literal(v), Sort::integer, v};
  return {real_literal(v), Sort::real, v};
}

std::string as_real(const Term& t) {
  if (t.sort == Sort::real) return t.text;
  if (t.constant) return real_literal(*t.constant);
  return "(to_real " + t.text + ")";
}

/// Brings both sides to a common sort.
std::pair<std::string, std::string> unify(const Term& a, const Term& b, Sort* sort = nullptr) {
  if (a.sort == Sort::integer && b.sort == Sort::integer) {
    if (sort) *sort = Sort::integer;
    return {a.text, b.text};
  }
  if (sort) *sort = Sort::real;
  return {as_real(a), as_real(b)};
}

std::string compare_text(CmpOp op, const Term& a, const Term& b) {
  auto [l, r] = unify(a, b);
  switch (op) {
    case CmpOp::eq: return "(= " + l + " " + r + ")";
    case CmpOp::ne: return "(not (= " + l + " " + r + "))";
    case CmpOp::lt: return "(< " + l + " " + r + ")";
    case CmpOp::le: return "(<= " + l + " " + r + ")";
    case CmpOp::gt: return "(> " + l + " " + r + ")";
    case CmpOp::ge: return "(>= " + l + " " + r + ")";
  }
  return {};
}

Term feature_term(const DatasetSchema& schema, std::size_t i, std::size_t copy) {
  return {smtvar::feature(i, copy), feature_sort(schema.feature(i)), std::nullopt};
}

/// Literal matching a feature's sort; integer features get ceil/floor of
/// fractional bounds via `round`.
std::string feature_literal(const DatasetSchema& schema, std::size_t i, const Rational& v) {
  return feature_sort(schema.feature(i)) == Sort::integer ? int_literal(v) : real_literal(v);
}

std::string conj(const std::vector<std::string>& parts) {
  if (parts.empty()) return "true";
  if (parts.size() == 1) return parts[0];
  std::string out = "(and";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string disj(const std::vector<std::string>& parts) {
  if (parts.empty()) return "false";
  if (parts.size() == 1) return parts[0];
  std::string out = "(or";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

class PropertyTranslator {
 public:
  PropertyTranslator(const PropertySpec& spec, const DatasetSchema& schema) : spec_(spec), schema_(schema) {}

  Term arith(const Arith& a) const {
    return std::visit(
        [&](const auto& n) -> Term {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Literal>) {
            return constant_term(n.value);
          } else if constexpr (std::is_same_v<T, FeatureRef>) {
            if (n.feature >= schema_.f_size()) throw PropertyError("feature index out of range");
            return feature_term(schema_, n.feature, copy(n.var));
          } else if constexpr (std::is_same_v<T, PredictRef>) {
            if (n.label >= schema_.l_size()) throw PropertyError("label index out of range");
            return {smtvar::label(n.label, copy(n.var)), Sort::integer, std::nullopt};
          } else {
            Term l = arith(*n.lhs);
            Term r = arith(*n.rhs);
            if (n.op == ArithOp::mul && !l.constant && !r.constant) {
              throw PropertyError("nonlinear term in property: " + to_string(a));
            }
            Sort sort;
            auto [ls, rs] = unify(l, r, &sort);
            const char* op = n.op == ArithOp::add ? "+" : n.op == ArithOp::sub ? "-" : "*";
            Term out{std::string("(") + op + " " + ls + " " + rs + ")", sort, std::nullopt};
            if (l.constant && r.constant) out.constant = constant_value(a);
            return out;
          }
        },
        a.node);
  }

  std::string cond(const Cond& c) const {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BoolLit>) {
            return n.value ? "true" : "false";
          } else if constexpr (std::is_same_v<T, Not>) {
            return "(not " + cond(*n.operand) + ")";
          } else if constexpr (std::is_same_v<T, CondBinary>) {
            const char* op = n.op == BoolOp::conj ? "and" : n.op == BoolOp::disj ? "or" : "=>";
            return std::string("(") + op + " " + cond(*n.lhs) + " " + cond(*n.rhs) + ")";
          } else {
            return compare_text(n.op, arith(*n.lhs), arith(*n.rhs));
          }
        },
        c.node);
  }

 private:
  std::size_t copy(const std::string& var) const { return spec_.var_index(var) + 1; }

  const PropertySpec& spec_;
  const DatasetSchema& schema_;
};

}  // namespace

std::string encode_condition(const Cond& c, const PropertySpec& spec, const DatasetSchema& schema) {
  return PropertyTranslator(spec, schema).cond(c);
}

// ---------------------------------------------------------------------------
// Encodings
// ---------------------------------------------------------------------------

Fragment encode_domain(const DatasetSchema& schema, std::size_t copy) {
  Fragment out;
  for (std::size_t i = 0; i < schema.f_size(); ++i) {
    const auto& f = schema.feature(i);
    const std::string v = smtvar::feature(i, copy);
    out.declarations.push_back("(declare-const " + v + " " + sort_name(feature_sort(f)) + ")");
    if (f.kind == FeatureKind::categorical) {
      std::vector<std::string> options;
      for (auto code : f.categories) options.push_back("(= " + v + " " + int_literal(Rational(code)) + ")");
      out.assertions.push_back(disj(options));
    } else if (f.kind == FeatureKind::integer) {
      out.assertions.push_back("(and (<= " + int_literal(ceil(f.min)) + " " + v + ") (<= " + v + " " +
                               int_literal(floor(f.max)) + "))");
    } else {
      out.assertions.push_back("(and (<= " + real_literal(f.min) + " " + v + ") (<= " + v + " " +
                               real_literal(f.max) + "))");
    }
  }
  for (std::size_t l = 0; l < schema.l_size(); ++l) {
    const std::string v = smtvar::label(l, copy);
    out.declarations.push_back("(declare-const " + v + " Int)");
    std::vector<std::string> options;
    for (auto code : schema.label(l).classes) options.push_back("(= " + v + " " + int_literal(Rational(code)) + ")");
    out.assertions.push_back(disj(options));
  }
  return out;
}

namespace {

std::string edge_text(const EdgeCondition& e, std::size_t copy, const DatasetSchema& schema) {
  Term var = feature_term(schema, e.feature, copy);
  Term thr = constant_term(e.threshold);
  switch (e.op) {
    case SplitOp::le: return compare_text(CmpOp::le, var, thr);
    case SplitOp::gt: return compare_text(CmpOp::gt, var, thr);
    case SplitOp::eq: return compare_text(CmpOp::eq, var, thr);
    case SplitOp::ne: return compare_text(CmpOp::ne, var, thr);
  }
  return {};
}

std::string class_equalities(const Prediction& p, std::size_t copy) {
  std::vector<std::string> parts;
  for (std::size_t l = 0; l < p.classes.size(); ++l) {
    parts.push_back("(= " + smtvar::label(l, copy) + " " + int_literal(Rational(p.classes[l])) + ")");
  }
  return conj(parts);
}

}  // namespace

Fragment encode_decision_tree(const DecisionTree& tree, std::size_t copy, const DatasetSchema& schema) {
  Fragment out;
  auto name = [&](std::size_t id) { return smtvar::node(tree.nodes[id].level, tree.nodes[id].index, copy); };
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    out.declarations.push_back("(declare-const " + name(id) + " Bool)");
  }
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const auto& node = tree.nodes[id];
    const std::string s = name(id);
    if (!node.parent) {
      out.assertions.push_back(s);
    } else {
      const std::string pre = name(*node.parent);
      const std::string cond = edge_text(*node.edge, copy, schema);
      out.assertions.push_back("(or (and " + pre + " " + cond + " " + s + ") (and (or (not " + pre + ") (not " + cond +
                               ")) (not " + s + ")))");
    }
    if (node.leaf) out.assertions.push_back("(=> " + s + " " + class_equalities(*node.leaf, copy) + ")");
  }
  return out;
}

Fragment encode_mlp(const MlpSurrogate& net, std::size_t copy, const DatasetSchema& schema) {
  Fragment out;
  const std::size_t n = net.layer_sizes.front();
  if (n != schema.f_size()) throw Error("network input size does not match schema");
  for (std::size_t j = 0; j < n; ++j) {
    const std::string o = smtvar::neuron_out(0, j, copy);
    out.declarations.push_back("(declare-const " + o + " Real)");
    Term f = feature_term(schema, j, copy);
    out.assertions.push_back("(= " + o + " (* " + real_literal(net.input_scale[j]) + " (- " + as_real(f) + " " +
                             real_literal(net.input_offset[j]) + ")))");
  }
  const std::size_t layers = net.weights.size();
  for (std::size_t i = 0; i < layers; ++i) {
    const std::size_t layer = i + 1;
    const bool output = i + 1 == layers;
    for (std::size_t l = 0; l < net.layer_sizes[layer]; ++l) {
      const std::string in = smtvar::neuron_in(layer, l, copy);
      out.declarations.push_back("(declare-const " + in + " Real)");
      std::vector<std::string> terms;
      for (std::size_t j = 0; j < net.layer_sizes[i]; ++j) {
        const Rational& w = net.weights[i][j][l];
        if (w == 0) continue;
        terms.push_back("(* " + weight_literal(w) + " " + smtvar::neuron_out(i, j, copy) + ")");
      }
      if (net.biases[i][l] != 0 || terms.empty()) terms.push_back(weight_literal(net.biases[i][l]));
      std::string sum = terms.size() == 1 ? terms[0] : "(+";
      if (terms.size() > 1) {
        for (const auto& t : terms) sum += " " + t;
        sum += ")";
      }
      out.assertions.push_back("(= " + in + " " + sum + ")");
      if (!output) {
        const std::string o = smtvar::neuron_out(layer, l, copy);
        out.declarations.push_back("(declare-const " + o + " Real)");
        out.assertions.push_back("(or (and (< " + in + " 0.0) (= " + o + " 0.0)) (and (>= " + in + " 0.0) (= " + o +
                                 " " + in + ")))");
      }
    }
  }
  const std::size_t last = layers;
  if (net.mode == MlpSurrogate::Mode::argmax) {
    std::vector<std::string> options;
    for (std::size_t c = 0; c < net.class_codes.size(); ++c) {
      std::vector<std::string> parts;
      for (std::size_t d = 0; d < net.class_codes.size(); ++d) {
        if (d == c) continue;
        parts.push_back("(>= " + smtvar::neuron_in(last, c, copy) + " " + smtvar::neuron_in(last, d, copy) + ")");
      }
      parts.push_back("(= " + smtvar::label(0, copy) + " " + int_literal(Rational(net.class_codes[c])) + ")");
      options.push_back(conj(parts));
    }
    out.assertions.push_back(disj(options));
  } else {
    const std::string th = weight_literal(net.threshold);
    for (std::size_t l = 0; l < net.layer_sizes.back(); ++l) {
      const std::string in = smtvar::neuron_in(last, l, copy);
      const std::string cls = smtvar::label(l, copy);
      out.assertions.push_back("(or (and (>= " + in + " " + th + ") (= " + cls + " 1)) (and (< " + in + " " + th +
                               ") (= " + cls + " 0)))");
    }
  }
  return out;
}

Fragment encode_surrogate(const Surrogate& model, std::size_t copy, const DatasetSchema& schema) {
  if (const auto* tree = std::get_if<DecisionTree>(&model)) return encode_decision_tree(*tree, copy, schema);
  return encode_mlp(std::get<MlpSurrogate>(model), copy, schema);
}

SmtScript encode_property(const PropertySpec& spec, const DatasetSchema& schema, const Surrogate& model,
                          const std::optional<FeatureBounds>& bounds) {
  SmtScript script;
  script.copies = spec.instance_vars.size();
  script.features = schema.f_size();
  script.labels = schema.l_size();
  for (std::size_t c = 1; c <= script.copies; ++c) {
    script.add(encode_domain(schema, c));
    script.add(encode_surrogate(model, c, schema));
  }
  if (bounds) {
    if (bounds->min.size() != schema.f_size() || bounds->max.size() != schema.f_size()) {
      throw Error("bounds do not match the schema");
    }
    for (std::size_t c = 1; c <= script.copies; ++c) {
      for (std::size_t i = 0; i < schema.f_size(); ++i) {
        const bool discrete = schema.feature(i).discrete();
        Rational lo = discrete ? ceil(bounds->min[i]) : bounds->min[i];
        Rational hi = discrete ? floor(bounds->max[i]) : bounds->max[i];
        const std::string v = smtvar::feature(i, c);
        script.assertions.push_back("(and (<= " + feature_literal(schema, i, lo) + " " + v + ") (<= " + v + " " +
                                    feature_literal(schema, i, hi) + "))");
      }
    }
  }
  PropertyTranslator translate(spec, schema);
  for (const auto& a : spec.assumes) script.assertions.push_back(translate.cond(*a.ast));
  script.assertions.push_back("(not " + translate.cond(*spec.assertion.ast) + ")");
  return script;
}

std::string block_assignment(const Assignment& a, const DatasetSchema& schema) {
  std::vector<std::string> parts;
  for (std::size_t c = 0; c < a.instances.size(); ++c) {
    for (std::size_t i = 0; i < schema.f_size(); ++i) {
      parts.push_back("(= " + smtvar::feature(i, c + 1) + " " + feature_literal(schema, i, a.instances[c].values[i]) +
                      ")");
    }
  }
  return "(not " + conj(parts) + ")";
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::sat: return "sat";
    case SolveStatus::unsat: return "unsat";
    case SolveStatus::unknown: return "unknown";
  }
  return "?";
}

std::string default_solver_command() {
  const char* env = std::getenv("MLCHECK_SOLVER");
  return env && *env ? env : "z3 -in";
}

SolveResult parse_solver_output(const std::string& raw, const SmtScript& script, const DatasetSchema& schema,
                                const std::vector<std::string>& extra_vars) {
  std::vector<SExpr> items;
  try {
    items = parse_sexprs(raw);
  } catch (const Error& e) {
    throw SolverError(std::string("unparseable solver output: ") + e.what(), raw);
  }
  SolveResult result;
  result.raw = raw;
  std::size_t k = 0;
  for (; k < items.size(); ++k) {
    const auto& item = items[k];
    if (!item.is_atom && !item.list.empty() && item.list[0].is("error")) {
      throw SolverError("solver error: " + item.to_string(), raw);
    }
    if (item.is("sat") || item.is("unsat") || item.is("unknown")) break;
    throw SolverError("unexpected solver output: " + item.to_string(), raw);
  }
  if (k == items.size()) throw SolverError("solver gave no answer", raw);
  if (items[k].is("unsat")) {
    result.status = SolveStatus::unsat;
    return result;
  }
  if (items[k].is("unknown")) {
    result.status = SolveStatus::unknown;
    return result;
  }
  result.status = SolveStatus::sat;
  Assignment a;
  a.raw = raw;
  const auto vars = all_vars(script, extra_vars);
  if (!vars.empty()) {
    if (k + 1 >= items.size() || items[k + 1].is_atom) throw SolverError("missing model values", raw);
    const auto& reply = items[k + 1];
    if (!reply.list.empty() && reply.list[0].is("error")) throw SolverError("solver error: " + reply.to_string(), raw);
    for (const auto& pair : reply.list) {
      if (pair.is_atom || pair.list.size() != 2 || !pair.list[0].is_atom) {
        throw SolverError("malformed model entry: " + pair.to_string(), raw);
      }
      try {
        a.values[pair.list[0].atom] = sexpr_to_rational(pair.list[1]);
      } catch (const Error& e) {
        throw SolverError(std::string("malformed model value: ") + e.what(), raw);
      }
    }
  }
  for (std::size_t c = 1; c <= script.copies; ++c) {
    Instance x;
    for (std::size_t i = 0; i < script.features; ++i) {
      auto it = a.values.find(smtvar::feature(i, c));
      if (it == a.values.end()) throw SolverError("model lacks " + smtvar::feature(i, c), raw);
      if (schema.feature(i).discrete() && !is_integer(it->second)) {
        throw SolverError("non-integer value for " + it->first, raw);
      }
      x.values.push_back(it->second);
    }
    Prediction p;
    for (std::size_t l = 0; l < script.labels; ++l) {
      auto it = a.values.find(smtvar::label(l, c));
      if (it == a.values.end()) throw SolverError("model lacks " + smtvar::label(l, c), raw);
      if (!is_integer(it->second) || !schema.label(l).has_class(to_int64(it->second))) {
        throw SolverError("invalid class value for " + it->first, raw);
      }
      p.classes.push_back(to_int64(it->second));
    }
    a.instances.push_back(std::move(x));
    a.predictions.push_back(std::move(p));
  }
  result.assignment = std::move(a);
  return result;
}

SolveResult solve(const SmtScript& script, const DatasetSchema& schema, const SolverConfig& config,
                  const std::vector<std::string>& extra, const std::vector<std::string>& extra_vars) {
  std::string text = script.body();
  for (const auto& e : extra) text += "(assert " + e + ")\n";
  text += query_text(all_vars(script, extra_vars));

  Subprocess process(config.command);
  if (!process.write(text)) {
    process.terminate();
    throw SolverError("solver '" + config.command + "' did not accept input", "");
  }
  process.close_input();
  std::string partial;
  auto output = process.read_all(config.timeout, &partial);
  if (!output) {
    process.terminate();
    SolveResult r;
    r.status = SolveStatus::unknown;
    r.raw = partial;
    return r;
  }
  process.finish(std::chrono::milliseconds(1000));
  if (output->find_first_not_of(" \t\r\n") == std::string::npos) {
    throw SolverError("solver '" + config.command + "' produced no output (exit code " +
                          std::to_string(process.exit_code()) + ")",
                      *output);
  }
  return parse_solver_output(*output, script, schema, extra_vars);
}

// ---------------------------------------------------------------------------

SolverSession::SolverSession(SmtScript script, const DatasetSchema& schema, SolverConfig config)
    : script_(std::move(script)), schema_(schema), config_(std::move(config)) {}

void SolverSession::start() {
  process_ = std::make_unique<Subprocess>(config_.command);
  if (!process_->write(script_.body())) {
    process_.reset();
    throw SolverError("solver '" + config_.command + "' did not accept input", "");
  }
}

std::string SolverSession::read_reply(std::chrono::steady_clock::time_point deadline) {
  // One complete expression: an atom line or a balanced list.
  std::string reply;
  int depth = 0;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) left = std::chrono::milliseconds(1);
    std::string line;
    auto status = process_->read_line(line, left);
    if (status == Subprocess::ReadStatus::timeout) return {};
    if (status == Subprocess::ReadStatus::eof) throw SolverError("solver exited unexpectedly", reply);
    if (reply.empty() && line.find_first_not_of(" \t\r") == std::string::npos) continue;
    bool in_string = false;
    for (char ch : line) {
      if (ch == '"') in_string = !in_string;
      if (in_string) continue;
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
    }
    reply += line + "\n";
    if (depth <= 0) return reply;
  }
}

SolveResult SolverSession::check(const std::vector<std::string>& extra, const std::vector<std::string>& extra_vars) {
  if (!process_) start();
  const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
  std::string query = "(push 1)\n";
  for (const auto& e : extra) query += "(assert " + e + ")\n";
  query += "(check-sat)\n";
  if (!process_->write(query)) {
    process_.reset();
    throw SolverError("solver exited unexpectedly", "");
  }
  std::string raw = read_reply(deadline);
  if (raw.empty()) {
    process_.reset();
    SolveResult r;
    r.status = SolveStatus::unknown;
    return r;
  }
  if (raw.rfind("sat", 0) == 0) {
    const auto vars = all_vars(script_, extra_vars);
    if (!vars.empty()) {
      std::string get = query_text(vars);
      get.erase(0, std::string("(check-sat)\n").size());
      if (!process_->write(get)) {
        process_.reset();
        throw SolverError("solver exited unexpectedly", raw);
      }
      std::string values = read_reply(deadline);
      if (values.empty()) {
        process_.reset();
        SolveResult r;
        r.status = SolveStatus::unknown;
        r.raw = raw;
        return r;
      }
      raw += values;
    }
  }
  process_->write("(pop 1)\n");
  try {
    return parse_solver_output(raw, script_, schema_, extra_vars);
  } catch (...) {
    process_.reset();
    throw;
  }
}

}  // namespace mlcheck
