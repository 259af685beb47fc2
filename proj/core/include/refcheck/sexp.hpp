#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace refcheck::smt {

/// S-expression used to build SMT-LIB commands. Atoms hold already-rendered
/// token text (symbols, numerals, string literals), so every composite term
/// is balanced by construction.
class Sexp {
 public:
  Sexp() = default;
  static Sexp atom(std::string text);
  static Sexp list(std::vector<Sexp> items);
  static Sexp app(std::string head, std::vector<Sexp> args);

  bool is_atom() const { return atom_; }
  const std::string& text() const { return text_; }
  const std::vector<Sexp>& items() const { return items_; }

  /// Single-line rendering.
  std::string flat() const;
  /// Deterministic layout: a node is rendered flat when it fits in
  /// `width` columns at the current indent, otherwise broken with the head
  /// (and the first argument, when short) kept on the opening line.
  std::string pretty(int indent = 0, int width = 100) const;

 private:
  bool atom_ = false;
  std::string text_;
  std::vector<Sexp> items_;
};

/// Renders an SMT-LIB string literal: printable ASCII stays literal, `"` is
/// doubled, backslash and everything else become \u{...} escapes.
std::string smt_string_literal(const std::u32string& text);
std::string smt_string_literal(char32_t cp);

/// Renders an SMT-LIB integer numeral; negatives as (- n).
std::string smt_int_literal(std::int64_t value);
/// Same over decimals, for Real contexts: 18 -> "18.0".
std::string smt_decimal_literal(std::int64_t value);

}  // namespace refcheck::smt
