#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mlcheck/rational.hpp"

namespace mlcheck {

/// Minimal S-expression tree for reading solver output.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> list;

  bool is(std::string_view symbol) const { return is_atom && atom == symbol; }
  std::string to_string() const;
};

/// Parses a sequence of top-level expressions. String literals ("...") are
/// kept as atoms including their quotes; `;` comments are skipped.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Reads a numeral, decimal, (- e), (/ e e) or (to_real e) exactly.
Rational sexpr_to_rational(const SExpr& e);

}  // namespace mlcheck
