#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refcheck/diagnostics.hpp"
#include "refcheck/sexp.hpp"

namespace refcheck::regex {

struct RegexAst;
using RegexPtr = std::shared_ptr<const RegexAst>;

/// Restricted regular-expression syntax tree. The matcher and the SMT
/// translation both consume this closed set; there are no backreferences,
/// no lookaround and no anchors; matching is whole-string.
struct RegexAst {
  struct Literal {
    char32_t cp;
  };
  struct AnyDigit {};  // \d, exactly [0-9]
  struct ClassRange {
    char32_t lo;  // singleton when lo == hi
    char32_t hi;
  };
  struct ClassDigit {};  // \d inside a class
  using ClassItem = std::variant<ClassRange, ClassDigit>;
  struct CharClass {
    std::vector<ClassItem> items;  // at least two items (singletons collapse)
  };
  struct Concat {
    std::vector<RegexPtr> parts;  // zero parts = empty-string language
  };
  struct Alt {
    std::vector<RegexPtr> branches;  // length >= 2
  };
  struct Loop {
    RegexPtr inner;
    std::uint32_t min = 0;
    std::optional<std::uint32_t> max;  // nullopt = unbounded
  };
  std::variant<Literal, AnyDigit, CharClass, Concat, Alt, Loop> node;
};

RegexPtr make_regex(std::variant<RegexAst::Literal, RegexAst::AnyDigit, RegexAst::CharClass,
                                 RegexAst::Concat, RegexAst::Alt, RegexAst::Loop>
                        node);

/// Parses the supported subset: literals, \d \\ \- \], character classes
/// with ranges, alternation, grouping, counted loops and * + ?.
/// Constructs outside the subset (other escapes, lookaround, anchors,
/// dot-any, negated classes) raise UnsupportedConstruct; malformed input
/// raises SyntaxError. Positions are 1-based codepoint columns into the
/// pattern.
RegexPtr parse_regex(std::string_view pattern);

/// Whole-string match. Runs an NFA simulation: worst case
/// O(|s| * expanded pattern size), no backtracking. Counted loops are
/// expanded at compile time; parse_regex bounds the expansion so compiling
/// cannot blow up. Invalid UTF-8 input is in no regex language.
bool matches(const RegexAst& re, std::string_view subject);

/// Compiled form for repeated matching of the same pattern.
class CompiledRegex {
 public:
  explicit CompiledRegex(const RegexAst& re);
  CompiledRegex(CompiledRegex&&) noexcept;
  CompiledRegex& operator=(CompiledRegex&&) noexcept;
  ~CompiledRegex();
  bool matches(std::string_view subject) const;
  bool matches(const std::u32string& subject) const;

 private:
  struct Nfa;
  std::unique_ptr<Nfa> nfa_;
};

/// SMT-LIB regex term over the Unicode string theory. `legacy_names`
/// selects the old dotted spellings (str.to.re) understood by solvers of
/// that era; the default emits SMT-LIB 2.6 names (str.to_re).
std::string to_smt(const RegexAst& re, bool legacy_names = false);
smt::Sexp to_smt_sexp(const RegexAst& re, bool legacy_names = false);

/// Canonical pattern text; parse_regex(render_regex(r)) is structurally
/// equal to r for every AST in normal form (the form parse_regex itself
/// produces: no singleton classes, no singleton concat/alt).
std::string render_regex(const RegexAst& re);

bool structurally_equal(const RegexAst& a, const RegexAst& b);

}  // namespace refcheck::regex
