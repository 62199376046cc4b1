#include "mlcheck/sexpr.hpp"

#include <cctype>

#include "mlcheck/error.hpp"

namespace mlcheck {

std::string SExpr::to_string() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ' ';
    out += list[i].to_string();
  }
  return out + ")";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    while (skip(), pos_ < text_.size()) out.push_back(expr());
    return out;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr expr() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of s-expression", pos_);
    char c = text_[pos_];
    if (c == ')') throw ParseError("unbalanced ')'", pos_);
    SExpr e;
    if (c == '(') {
      ++pos_;
      e.is_atom = false;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw ParseError("missing ')'", pos_);
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.list.push_back(expr());
      }
    }
    std::size_t start = pos_;
    if (c == '"') {
      ++pos_;
      while (pos_ < text_.size()) {
        if (text_[pos_] == '"') {
          // "" is an escaped quote in SMT-LIB strings
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            pos_ += 2;
            continue;
          }
          break;
        }
        ++pos_;
      }
      if (pos_ >= text_.size()) throw ParseError("unterminated string", start);
      ++pos_;
    } else if (c == '|') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '|') ++pos_;
      if (pos_ >= text_.size()) throw ParseError("unterminated quoted symbol", start);
      ++pos_;
    } else {
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
        ++pos_;
      }
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).all(); }

Rational sexpr_to_rational(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom.empty() || !(std::isdigit(static_cast<unsigned char>(e.atom[0])))) {
      throw Error("not a numeric literal: " + e.atom);
    }
    return parse_rational(e.atom);
  }
  if (e.list.size() == 2 && e.list[0].is("-")) return -sexpr_to_rational(e.list[1]);
  if (e.list.size() == 2 && e.list[0].is("to_real")) return sexpr_to_rational(e.list[1]);
  if (e.list.size() == 3 && e.list[0].is("/")) {
    Rational den = sexpr_to_rational(e.list[2]);
    if (den == 0) throw Error("division by zero in model value");
    return sexpr_to_rational(e.list[1]) / den;
  }
  throw Error("not a numeric term: " + e.to_string());
}

}  // namespace mlcheck
