#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "refcheck/diagnostics.hpp"
#include "refcheck/predicate.hpp"
#include "refcheck/regex.hpp"

namespace refcheck::lang {

enum class BasicKind { Void, Bool, Int, Double, String };

std::string_view to_string(BasicKind kind);

/// Refinements keep the source text as written next to the parsed form;
/// printers echo the text, the checker and validator use the AST.
struct RegexRefinement {
  std::string pattern;  // decoded string-literal content
  regex::RegexPtr ast;
};

struct PredicateRefinement {
  std::string text;  // verbatim between the refinement parentheses
  std::string binder;
  pred::PredPtr ast;
};

using Refinement = std::variant<std::monostate, RegexRefinement, PredicateRefinement>;

inline bool has_refinement(const Refinement& r) {
  return !std::holds_alternative<std::monostate>(r);
}

struct Cardinality {
  std::uint32_t min = 1;
  std::optional<std::uint32_t> max = 1;  // nullopt = unbounded

  bool is_single() const { return min == 1 && max && *max == 1; }
  bool admits(std::size_t n) const { return n >= min && (!max || n <= *max); }
};

inline bool operator==(const Cardinality& a, const Cardinality& b) {
  return a.min == b.min && a.max == b.max;
}

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct FieldDecl {
  std::string name;
  Cardinality card;
  TypePtr type;
  Pos pos;
};

struct TypeNode {
  BasicKind basic = BasicKind::Void;
  Refinement refinement;
  std::vector<FieldDecl> children;  // field names unique
};

struct TypeChoice {
  std::vector<TypePtr> alternatives;  // length >= 2
};

struct TypeNamed {
  std::string name;
};

/// A type expression: a tree node with basic kind, optional refinement and
/// named children; a choice between alternatives; or a reference to a
/// declared type.
struct TypeExpr {
  using Node = TypeNode;
  using Choice = TypeChoice;
  using Named = TypeNamed;
  std::variant<TypeNode, TypeChoice, TypeNamed> node;
  Pos pos;
};

TypePtr make_type(std::variant<TypeNode, TypeChoice, TypeNamed> node, Pos pos = {});

struct TypeDecl {
  std::string name;
  TypePtr body;
  Pos pos;
};

/// Solicit-response operation signature. Request and response are either
/// named references or bare basic kinds, never inline trees.
struct OpDecl {
  std::string name;
  TypePtr request;
  TypePtr response;
  Pos pos;
};

/// Argument to a call: base variable plus a field-projection chain.
struct Path {
  std::string base;
  std::vector<std::string> fields;
  Pos pos;                     // of the base variable
  std::vector<Pos> fieldPos;   // one per projection
};

std::string to_string(const Path& path);

struct CallStmt {
  std::string operation;
  Path argument;
  std::string output;
  Pos pos;        // of the operation name
  Pos outputPos;
};

struct Procedure {
  std::string name;
  std::string paramVar;
  std::vector<CallStmt> body;
  Pos pos;
};

struct Program {
  std::vector<TypeDecl> typeDecls;    // declaration order, names unique
  std::vector<OpDecl> operations;
  std::vector<Procedure> procedures;
};

/// Position-insensitive structural comparison; refinements compare by AST,
/// not by source spelling.
bool structurally_equal(const TypeExpr& a, const TypeExpr& b);
bool structurally_equal(const Program& a, const Program& b);

/// Parses a whole compilation unit. Throws CompileError carrying a single
/// diagnostic at the first problem: SyntaxError, DuplicateName,
/// BadRefinement (refinement on a kind that cannot carry it), or the
/// regex/predicate sub-language errors rebased to source positions.
Program parse_program(std::string_view source);

/// Canonical source form; parse_program(pretty_print(p)) is structurally
/// equal to p for any parser-produced program. Port annotations are not
/// part of the AST, so printing drops nothing that parsing kept.
std::string pretty_print(const Program& p);

}  // namespace refcheck::lang
