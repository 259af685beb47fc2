#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refcheck/diagnostics.hpp"
#include "refcheck/sexp.hpp"

namespace refcheck::pred {

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct ArithExpr;
using ArithPtr = std::shared_ptr<const ArithExpr>;

/// Linear arithmetic over a single bound variable: the binder, integer
/// literals, + - and multiplication with an integer-constant side.
struct ArithExpr {
  struct Var {};
  struct Lit {
    std::int64_t value;
  };
  struct Add {
    ArithPtr lhs, rhs;
  };
  struct Sub {
    ArithPtr lhs, rhs;
  };
  struct Neg {
    ArithPtr inner;
  };
  struct Mul {
    ArithPtr lhs, rhs;  // at least one side is a constant expression
  };
  std::variant<Var, Lit, Add, Sub, Neg, Mul> node;
};

struct PredAst;
using PredPtr = std::shared_ptr<const PredAst>;

/// Boolean combination of comparisons between linear expressions.
struct PredAst {
  struct Cmp {
    CmpOp op;
    ArithPtr lhs, rhs;
  };
  struct And {
    std::vector<PredPtr> parts;  // length >= 2
  };
  struct Or {
    std::vector<PredPtr> parts;  // length >= 2
  };
  struct Not {
    PredPtr inner;
  };
  std::variant<Cmp, And, Or, Not> node;
};

struct ParsedPredicate {
  std::string binder;
  PredPtr pred;
};

/// Parses `text` with the given binder as the only legal identifier.
/// An empty `binder` means infer it: the first identifier seen becomes the
/// binder. Raises SyntaxError for malformed input, UnknownVariable for a
/// second distinct identifier, NonlinearTerm when a product has no
/// constant side, NumberOutOfRange for literals (or constant
/// subexpressions) outside 64-bit signed range. Comparison operators do
/// not chain.
ParsedPredicate parse_predicate(std::string_view text, std::string_view binder = {});

/// Evaluates with the binder bound to v. Integer evaluation uses 128-bit
/// intermediates, saturating at the 128-bit range, so any predicate whose
/// constants and subject fit in 64 bits evaluates exactly.
bool eval(const PredAst& p, std::int64_t v);
bool eval(const PredAst& p, double v);

enum class NumSort { Int, Real };

/// SMT boolean term denoting p with the binder replaced by `subject`.
/// `sort` selects the literal spelling (Int `18` vs Real `18.0`); pass a
/// null predicate to get `true`.
smt::Sexp to_smt(const PredAst* p, const smt::Sexp& subject, NumSort sort);
std::string to_smt(const PredAst* p, std::string_view subject_text, NumSort sort);

bool structurally_equal(const PredAst& a, const PredAst& b);
bool structurally_equal(const ArithExpr& a, const ArithExpr& b);

}  // namespace refcheck::pred
