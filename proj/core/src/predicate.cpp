#include <cctype>
#include <cstdlib>
#include <limits>
#include <optional>
#include <utility>

#include "refcheck/predicate.hpp"

namespace refcheck::pred {

namespace {

// Untyped surface expression; boolean/arithmetic shape is sorted out in a
// second pass so `(age+1)*2 > 3` and `!(age>3)` share one grammar.
struct Expr;
using ExprPtr = std::shared_ptr<Expr>;
struct Expr {
  enum Kind { Or, And, Not, Cmp, Add, Sub, Neg, Mul, Lit, Ident } kind;
  CmpOp cmp = CmpOp::Lt;
  std::vector<ExprPtr> kids;
  std::int64_t lit = 0;
  std::string name;
  Pos pos;
};

ExprPtr mk(Expr::Kind kind, Pos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    ExprPtr e = parse_or();
    skip_ws();
    if (i_ < text_.size()) err("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t i_ = 0;

  Pos here() const { return Pos{1, static_cast<int>(i_) + 1}; }
  [[noreturn]] void err(const std::string& msg) { fail(ErrKind::SyntaxError, here(), msg); }

  void skip_ws() {
    while (i_ < text_.size() && (text_[i_] == ' ' || text_[i_] == '\t')) ++i_;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(i_, tok.size()) != tok) return false;
    i_ += tok.size();
    return true;
  }

  char peek() {
    skip_ws();
    return i_ < text_.size() ? text_[i_] : '\0';
  }

  ExprPtr parse_or() {
    Pos pos = here();
    std::vector<ExprPtr> parts{parse_and()};
    while (eat("||")) parts.push_back(parse_and());
    if (parts.size() == 1) return parts[0];
    auto e = mk(Expr::Or, pos);
    e->kids = std::move(parts);
    return e;
  }

  ExprPtr parse_and() {
    Pos pos = here();
    std::vector<ExprPtr> parts{parse_not()};
    while (true) {
      skip_ws();
      // avoid eating the first '&' of a stray "&"
      if (text_.substr(i_, 2) != "&&") break;
      i_ += 2;
      parts.push_back(parse_not());
    }
    if (parts.size() == 1) return parts[0];
    auto e = mk(Expr::And, pos);
    e->kids = std::move(parts);
    return e;
  }

  ExprPtr parse_not() {
    skip_ws();
    Pos pos = here();
    if (i_ < text_.size() && text_[i_] == '!' && (i_ + 1 >= text_.size() || text_[i_ + 1] != '=')) {
      ++i_;
      auto e = mk(Expr::Not, pos);
      e->kids.push_back(parse_not());
      return e;
    }
    return parse_cmp();
  }

  std::optional<CmpOp> peek_cmp_op() {
    skip_ws();
    auto two = text_.substr(i_, 2);
    if (two == "<=") return CmpOp::Le;
    if (two == ">=") return CmpOp::Ge;
    if (two == "==") return CmpOp::Eq;
    if (two == "!=") return CmpOp::Ne;
    char c = i_ < text_.size() ? text_[i_] : '\0';
    if (c == '<') return CmpOp::Lt;
    if (c == '>') return CmpOp::Gt;
    return std::nullopt;
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_sum();
    auto op = peek_cmp_op();
    if (!op) return lhs;
    Pos pos = here();
    i_ += (*op == CmpOp::Lt || *op == CmpOp::Gt) ? 1 : 2;
    ExprPtr rhs = parse_sum();
    if (peek_cmp_op()) err("comparison operators do not chain; use '&&'");
    auto e = mk(Expr::Cmp, pos);
    e->cmp = *op;
    e->kids = {std::move(lhs), std::move(rhs)};
    return e;
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_term();
    while (true) {
      skip_ws();
      Pos pos = here();
      char c = i_ < text_.size() ? text_[i_] : '\0';
      if (c != '+' && c != '-') break;
      ++i_;
      auto e = mk(c == '+' ? Expr::Add : Expr::Sub, pos);
      e->kids = {std::move(lhs), parse_term()};
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (true) {
      skip_ws();
      Pos pos = here();
      if (i_ >= text_.size() || text_[i_] != '*') break;
      ++i_;
      auto e = mk(Expr::Mul, pos);
      e->kids = {std::move(lhs), parse_factor()};
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    skip_ws();
    Pos pos = here();
    if (i_ >= text_.size()) err("expected an expression");
    char c = text_[i_];
    if (c == '-') {
      ++i_;
      auto e = mk(Expr::Neg, pos);
      e->kids.push_back(parse_factor());
      return e;
    }
    if (c == '(') {
      ++i_;
      ExprPtr inner = parse_or();
      if (!eat(")")) err("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t value = 0;
      while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
        value = value * 10 + static_cast<std::uint64_t>(text_[i_] - '0');
        if (value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
          fail(ErrKind::NumberOutOfRange, pos, "integer literal exceeds 64-bit signed range");
        ++i_;
      }
      auto e = mk(Expr::Lit, pos);
      e->lit = static_cast<std::int64_t>(value);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      auto e = mk(Expr::Ident, pos);
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
        e->name += text_[i_++];
      }
      return e;
    }
    err(std::string("unexpected character '") + c + "'");
  }
};

constexpr __int128 kI128Max = ((static_cast<__int128>(0x7fffffffffffffffLL) << 64) |
                               static_cast<__int128>(0xffffffffffffffffULL));
constexpr __int128 kI128Min = -kI128Max - 1;

__int128 sat_add(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_add_overflow(a, b, &r)) return b > 0 ? kI128Max : kI128Min;
  return r;
}
__int128 sat_sub(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_sub_overflow(a, b, &r)) return b < 0 ? kI128Max : kI128Min;
  return r;
}
__int128 sat_mul(__int128 a, __int128 b) {
  __int128 r;
  if (__builtin_mul_overflow(a, b, &r)) return (a < 0) == (b < 0) ? kI128Max : kI128Min;
  return r;
}
__int128 sat_neg(__int128 a) { return a == kI128Min ? kI128Max : -a; }

// Shape pass: checks binder use and linearity while lowering the untyped
// tree into PredAst / ArithExpr.
class Builder {
 public:
  explicit Builder(std::string_view binder) : binder_(binder) {}

  PredPtr build(const ExprPtr& e) { return as_pred(e); }
  const std::string& binder() const { return binder_; }

 private:
  std::string binder_;

  static PredPtr mk_pred(std::variant<PredAst::Cmp, PredAst::And, PredAst::Or, PredAst::Not> n) {
    auto p = std::make_shared<PredAst>();
    p->node = std::move(n);
    return p;
  }
  static ArithPtr mk_arith(
      std::variant<ArithExpr::Var, ArithExpr::Lit, ArithExpr::Add, ArithExpr::Sub, ArithExpr::Neg,
                   ArithExpr::Mul>
          n) {
    auto a = std::make_shared<ArithExpr>();
    a->node = std::move(n);
    return a;
  }

  PredPtr as_pred(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Or:
      case Expr::And: {
        std::vector<PredPtr> parts;
        parts.reserve(e->kids.size());
        for (const auto& kid : e->kids) parts.push_back(as_pred(kid));
        if (e->kind == Expr::Or) return mk_pred(PredAst::Or{std::move(parts)});
        return mk_pred(PredAst::And{std::move(parts)});
      }
      case Expr::Not:
        return mk_pred(PredAst::Not{as_pred(e->kids[0])});
      case Expr::Cmp:
        return mk_pred(PredAst::Cmp{e->cmp, as_arith(e->kids[0]), as_arith(e->kids[1])});
      default:
        fail(ErrKind::SyntaxError, e->pos, "expected a comparison, found an arithmetic term");
    }
  }

  ArithPtr as_arith(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Lit:
        return mk_arith(ArithExpr::Lit{e->lit});
      case Expr::Ident:
        if (binder_.empty()) binder_ = e->name;
        if (e->name != binder_)
          fail(ErrKind::UnknownVariable, e->pos,
               "unknown variable `" + e->name + "`; the refinement binds only `" + binder_ + "`");
        return mk_arith(ArithExpr::Var{});
      case Expr::Neg:
        return mk_arith(ArithExpr::Neg{as_arith(e->kids[0])});
      case Expr::Add:
        return mk_arith(ArithExpr::Add{as_arith(e->kids[0]), as_arith(e->kids[1])});
      case Expr::Sub:
        return mk_arith(ArithExpr::Sub{as_arith(e->kids[0]), as_arith(e->kids[1])});
      case Expr::Mul: {
        if (!is_constant(e->kids[0]) && !is_constant(e->kids[1]))
          fail(ErrKind::NonlinearTerm, e->pos,
               "product of two terms that both mention the binder is not linear");
        return mk_arith(ArithExpr::Mul{as_arith(e->kids[0]), as_arith(e->kids[1])});
      }
      default:
        fail(ErrKind::SyntaxError, e->pos, "expected an arithmetic term, found a condition");
    }
  }

  static bool is_constant(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Lit:
        return true;
      case Expr::Ident:
        return false;
      case Expr::Neg:
        return is_constant(e->kids[0]);
      case Expr::Add:
      case Expr::Sub:
      case Expr::Mul:
        return is_constant(e->kids[0]) && is_constant(e->kids[1]);
      default:
        return false;
    }
  }
};

// Constant subexpressions must stay within int64 so later evaluation in
// 128-bit intermediates cannot saturate for in-range subjects.
struct ConstCheck {
  // returns the value when the subtree is constant
  static std::optional<__int128> walk(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Lit:
        return static_cast<__int128>(e->lit);
      case Expr::Ident:
        return std::nullopt;
      case Expr::Neg: {
        auto v = walk(e->kids[0]);
        if (!v) return std::nullopt;
        return check(e->pos, sat_neg(*v));
      }
      case Expr::Add:
      case Expr::Sub:
      case Expr::Mul: {
        auto l = walk(e->kids[0]);
        auto r = walk(e->kids[1]);
        if (e->kind == Expr::Add && l && r) return check(e->pos, sat_add(*l, *r));
        if (e->kind == Expr::Sub && l && r) return check(e->pos, sat_sub(*l, *r));
        if (e->kind == Expr::Mul && l && r) return check(e->pos, sat_mul(*l, *r));
        return std::nullopt;
      }
      default:
        for (const auto& kid : e->kids) walk(kid);
        return std::nullopt;
    }
  }

  static __int128 check(Pos pos, __int128 v) {
    if (v > static_cast<__int128>(std::numeric_limits<std::int64_t>::max()) ||
        v < static_cast<__int128>(std::numeric_limits<std::int64_t>::min()))
      fail(ErrKind::NumberOutOfRange, pos, "constant subexpression exceeds 64-bit signed range");
    return v;
  }
};

template <class Num>
struct Evaluator {
  Num subject;

  Num arith(const ArithExpr& a) const {
    return std::visit(
        [this](const auto& node) -> Num {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ArithExpr::Var>) {
            return subject;
          } else if constexpr (std::is_same_v<T, ArithExpr::Lit>) {
            return static_cast<Num>(node.value);
          } else if constexpr (std::is_same_v<T, ArithExpr::Add>) {
            if constexpr (std::is_same_v<Num, __int128>)
              return sat_add(arith(*node.lhs), arith(*node.rhs));
            else
              return arith(*node.lhs) + arith(*node.rhs);
          } else if constexpr (std::is_same_v<T, ArithExpr::Sub>) {
            if constexpr (std::is_same_v<Num, __int128>)
              return sat_sub(arith(*node.lhs), arith(*node.rhs));
            else
              return arith(*node.lhs) - arith(*node.rhs);
          } else if constexpr (std::is_same_v<T, ArithExpr::Neg>) {
            if constexpr (std::is_same_v<Num, __int128>)
              return sat_neg(arith(*node.inner));
            else
              return -arith(*node.inner);
          } else {
            if constexpr (std::is_same_v<Num, __int128>)
              return sat_mul(arith(*node.lhs), arith(*node.rhs));
            else
              return arith(*node.lhs) * arith(*node.rhs);
          }
        },
        a.node);
  }

  bool pred(const PredAst& p) const {
    return std::visit(
        [this](const auto& node) -> bool {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, PredAst::Cmp>) {
            Num l = arith(*node.lhs);
            Num r = arith(*node.rhs);
            switch (node.op) {
              case CmpOp::Lt: return l < r;
              case CmpOp::Le: return l <= r;
              case CmpOp::Gt: return l > r;
              case CmpOp::Ge: return l >= r;
              case CmpOp::Eq: return l == r;
              case CmpOp::Ne: return l != r;
            }
            return false;
          } else if constexpr (std::is_same_v<T, PredAst::And>) {
            for (const auto& part : node.parts)
              if (!pred(*part)) return false;
            return true;
          } else if constexpr (std::is_same_v<T, PredAst::Or>) {
            for (const auto& part : node.parts)
              if (pred(*part)) return true;
            return false;
          } else {
            return !pred(*node.inner);
          }
        },
        p.node);
  }
};

smt::Sexp arith_to_smt(const ArithExpr& a, const smt::Sexp& subject, NumSort sort) {
  return std::visit(
      [&](const auto& node) -> smt::Sexp {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ArithExpr::Var>) {
          return subject;
        } else if constexpr (std::is_same_v<T, ArithExpr::Lit>) {
          return smt::Sexp::atom(sort == NumSort::Int ? smt::smt_int_literal(node.value)
                                                      : smt::smt_decimal_literal(node.value));
        } else if constexpr (std::is_same_v<T, ArithExpr::Add>) {
          return smt::Sexp::app("+", {arith_to_smt(*node.lhs, subject, sort),
                                      arith_to_smt(*node.rhs, subject, sort)});
        } else if constexpr (std::is_same_v<T, ArithExpr::Sub>) {
          return smt::Sexp::app("-", {arith_to_smt(*node.lhs, subject, sort),
                                      arith_to_smt(*node.rhs, subject, sort)});
        } else if constexpr (std::is_same_v<T, ArithExpr::Neg>) {
          return smt::Sexp::app("-", {arith_to_smt(*node.inner, subject, sort)});
        } else {
          return smt::Sexp::app("*", {arith_to_smt(*node.lhs, subject, sort),
                                      arith_to_smt(*node.rhs, subject, sort)});
        }
      },
      a.node);
}

smt::Sexp pred_to_smt(const PredAst& p, const smt::Sexp& subject, NumSort sort) {
  return std::visit(
      [&](const auto& node) -> smt::Sexp {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, PredAst::Cmp>) {
          smt::Sexp l = arith_to_smt(*node.lhs, subject, sort);
          smt::Sexp r = arith_to_smt(*node.rhs, subject, sort);
          switch (node.op) {
            case CmpOp::Lt: return smt::Sexp::app("<", {std::move(l), std::move(r)});
            case CmpOp::Le: return smt::Sexp::app("<=", {std::move(l), std::move(r)});
            case CmpOp::Gt: return smt::Sexp::app(">", {std::move(l), std::move(r)});
            case CmpOp::Ge: return smt::Sexp::app(">=", {std::move(l), std::move(r)});
            case CmpOp::Eq: return smt::Sexp::app("=", {std::move(l), std::move(r)});
            case CmpOp::Ne:
              return smt::Sexp::app("not", {smt::Sexp::app("=", {std::move(l), std::move(r)})});
          }
          return smt::Sexp::atom("false");
        } else if constexpr (std::is_same_v<T, PredAst::And> || std::is_same_v<T, PredAst::Or>) {
          std::vector<smt::Sexp> parts;
          parts.reserve(node.parts.size());
          for (const auto& part : node.parts) parts.push_back(pred_to_smt(*part, subject, sort));
          return smt::Sexp::app(std::is_same_v<T, PredAst::And> ? "and" : "or", std::move(parts));
        } else {
          return smt::Sexp::app("not", {pred_to_smt(*node.inner, subject, sort)});
        }
      },
      p.node);
}

}  // namespace

ParsedPredicate parse_predicate(std::string_view text, std::string_view binder) {
  Parser parser(text);
  ExprPtr untyped = parser.parse();
  ConstCheck::walk(untyped);
  Builder builder(binder);
  PredPtr pred = builder.build(untyped);
  return ParsedPredicate{builder.binder(), std::move(pred)};
}

bool eval(const PredAst& p, std::int64_t v) {
  return Evaluator<__int128>{static_cast<__int128>(v)}.pred(p);
}

bool eval(const PredAst& p, double v) { return Evaluator<double>{v}.pred(p); }

smt::Sexp to_smt(const PredAst* p, const smt::Sexp& subject, NumSort sort) {
  if (!p) return smt::Sexp::atom("true");
  return pred_to_smt(*p, subject, sort);
}

std::string to_smt(const PredAst* p, std::string_view subject_text, NumSort sort) {
  return to_smt(p, smt::Sexp::atom(std::string(subject_text)), sort).flat();
}

bool structurally_equal(const ArithExpr& a, const ArithExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto& _a) -> bool {
        using T = std::decay_t<decltype(_a)>;
        const auto& _b = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, ArithExpr::Var>) {
          return true;
        } else if constexpr (std::is_same_v<T, ArithExpr::Lit>) {
          return _a.value == _b.value;
        } else if constexpr (std::is_same_v<T, ArithExpr::Neg>) {
          return structurally_equal(*_a.inner, *_b.inner);
        } else {
          return structurally_equal(*_a.lhs, *_b.lhs) && structurally_equal(*_a.rhs, *_b.rhs);
        }
      },
      a.node);
}

bool structurally_equal(const PredAst& a, const PredAst& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto& _a) -> bool {
        using T = std::decay_t<decltype(_a)>;
        const auto& _b = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, PredAst::Cmp>) {
          return _a.op == _b.op && structurally_equal(*_a.lhs, *_b.lhs) &&
                 structurally_equal(*_a.rhs, *_b.rhs);
        } else if constexpr (std::is_same_v<T, PredAst::Not>) {
          return structurally_equal(*_a.inner, *_b.inner);
        } else {
          if (_a.parts.size() != _b.parts.size()) return false;
          for (std::size_t i = 0; i < _a.parts.size(); ++i)
            if (!structurally_equal(*_a.parts[i], *_b.parts[i])) return false;
          return true;
        }
      },
      a.node);
}

}  // namespace refcheck::pred
