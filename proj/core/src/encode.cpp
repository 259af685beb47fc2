#include "refcheck/encode.hpp"

#include <map>
#include <set>
#include <utility>

#include "refcheck/predicate.hpp"
#include "refcheck/regex.hpp"

namespace refcheck::enc {

namespace {

using lang::BasicKind;
using lang::Cardinality;
using lang::ResolvedProgram;
using lang::TypeExpr;
using smt::Sexp;

// SMT-LIB 2.6 simple-symbol alphabet.
bool is_simple_symbol(const std::string& s) {
  if (s.empty()) return false;
  auto ok = [](char c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
    return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
  };
  if (s[0] >= '0' && s[0] <= '9') return false;
  for (char c : s)
    if (!ok(c)) return false;
  return true;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "BINARY", "DECIMAL", "HEXADECIMAL", "NUMERAL", "STRING", "_",      "as",
      "let",    "exists",  "forall",      "match",   "par",    "assert", "echo",
      "exit",   "pop",     "push",        "reset",
  };
  return words;
}

// Theory symbols a generated name could shadow. Names with characters our
// identifiers cannot produce (`+`, `<`, ...) need no entry.
const std::set<std::string>& builtin_symbols() {
  static const std::set<std::string> syms = {
      "true",          "false",         "not",          "and",          "or",
      "xor",           "distinct",      "ite",          "div",          "mod",
      "abs",           "rem",           "divisible",    "to_real",      "to_int",
      "is_int",        "str.len",       "str.at",       "str.substr",   "str.contains",
      "str.indexof",   "str.replace",   "str.prefixof", "str.suffixof", "str.is_digit",
      "str.to_code",   "str.from_code", "str.to_int",   "str.from_int", "str.to_re",
      "str.in_re",     "str.to.re",     "str.in.re",    "re.none",      "re.all",
      "re.allchar",    "re.union",      "re.inter",     "re.comp",      "re.diff",
      "re.opt",        "re.range",      "re.loop",      "seq.unit",     "seq.len",
      "seq.extract",   "seq.at",        "seq.nth",      "seq.contains", "seq.indexof",
      "seq.replace",   "seq.prefixof",  "seq.suffixof", "RegLan",       "RegEx",
  };
  return syms;
}

Sexp sym(const std::string& name) {
  if (!is_simple_symbol(name) || reserved_words().count(name)) return Sexp::atom("|" + name + "|");
  return Sexp::atom(name);
}

const char* basic_symbol(BasicKind k) {
  switch (k) {
    case BasicKind::Void: return "void";
    case BasicKind::Bool: return "bool";
    case BasicKind::Int: return "int";
    case BasicKind::Double: return "double";
    case BasicKind::String: return "string";
  }
  return "void";
}

const char* unbox_symbol(BasicKind k) {
  switch (k) {
    case BasicKind::Bool: return "bool-term-val";
    case BasicKind::Int: return "int-term-val";
    case BasicKind::Double: return "double-term-val";
    case BasicKind::String: return "string-term-val";
    case BasicKind::Void: break;
  }
  return "string-term-val";
}

Sexp apply(const std::string& fn, std::vector<Sexp> args) {
  std::vector<Sexp> items;
  items.reserve(args.size() + 1);
  items.push_back(sym(fn));
  for (auto& a : args) items.push_back(std::move(a));
  return Sexp::list(std::move(items));
}

Sexp forall1(const char* var, const char* sort, Sexp body) {
  return Sexp::app("forall",
                   {Sexp::list({Sexp::list({Sexp::atom(var), Sexp::atom(sort)})}), std::move(body)});
}

Sexp assert_cmd(Sexp body) { return Sexp::app("assert", {std::move(body)}); }

Sexp and_of(std::vector<Sexp> parts) {
  if (parts.size() == 1) return std::move(parts[0]);
  return Sexp::app("and", std::move(parts));
}

std::string card_text(const Cardinality& c) {
  std::string out = "[" + std::to_string(c.min) + ",";
  out += c.max ? std::to_string(*c.max) : "*";
  return out + "]";
}

struct EncodedField {
  std::string name;
  Cardinality card;
  std::string projection;  // empty when the field is statically opaque
  std::string typeSymbol;  // empty when opaque and inline
  const TypeExpr* type = nullptr;
};

struct TypeInfo {
  enum class Kind { Basic, Refined, Tree, Choice, Alias };
  Kind kind = Kind::Basic;
  BasicKind basic = BasicKind::Void;
  const lang::Refinement* refinement = nullptr;  // Refined always, Tree sometimes
  std::string reSym;                             // regex define-fun, when regex refined
  std::vector<EncodedField> fields;
  std::vector<std::string> alternatives;
  std::string aliasTarget;
};

struct OpInfo {
  std::string symbol;
  std::string reqSym, respSym;
  std::string reqDisplay, respDisplay;
  const TypeExpr* req = nullptr;
  const TypeExpr* resp = nullptr;
};

class Encoder {
 public:
  Encoder(const ResolvedProgram& rp, const EncodeOptions& opts) : rp_(rp), opts_(opts) {}

  Encoded run() {
    out_.base = encode_prelude(opts_);
    for (const char* b : {"void", "bool", "int", "double", "string"}) {
      used_.insert(b);
      info_[b].kind = TypeInfo::Kind::Basic;
    }
    for (const char* s : {"Type", "Term", "HasType", "UnitTerm", "BoxBool", "BoxInt", "BoxDouble",
                          "BoxString", "bool-term-val", "int-term-val", "double-term-val",
                          "string-term-val"})
      used_.insert(s);

    const lang::Program& p = rp_.program();
    for (const auto& d : p.typeDecls) declSym_[d.name] = fresh(d.name);
    if (!p.typeDecls.empty()) decls_.comment("type symbols and projections");
    for (const auto& d : p.typeDecls) declare_type(declSym_[d.name], *d.body);
    emit_type_axioms();
    encode_operations();
    for (const auto& proc : p.procedures) generate_procedure(proc);
    return std::move(out_);
  }

 private:
  std::string fresh(const std::string& desired) {
    std::string name = desired;
    for (int n = 1; used_.count(name) || builtin_symbols().count(name); ++n)
      name = desired + "!" + std::to_string(n);
    used_.insert(name);
    return name;
  }

  // Declares the Type constant, projection functions and regex definitions
  // for one type expression, recursing into inline children. Axioms are
  // deferred so that forward references stay legal.
  void declare_type(const std::string& symbol, const TypeExpr& t) {
    order_.push_back(symbol);
    decls_.add(Sexp::app("declare-fun", {sym(symbol), Sexp::list({}), Sexp::atom("Type")}));
    TypeInfo& info = info_[symbol];

    if (const auto* named = std::get_if<lang::TypeNamed>(&t.node)) {
      info.kind = TypeInfo::Kind::Alias;
      info.aliasTarget = declSym_.at(named->name);
      return;
    }
    if (const auto* choice = std::get_if<lang::TypeChoice>(&t.node)) {
      info.kind = TypeInfo::Kind::Choice;
      std::size_t i = 0;
      std::vector<std::string> alts;
      for (const auto& alt : choice->alternatives)
        alts.push_back(symbol_for(*alt, symbol + "!alt" + std::to_string(i++)));
      info_[symbol].alternatives = std::move(alts);  // info may be stale after recursion
      return;
    }

    const auto& node = std::get<lang::TypeNode>(t.node);
    info.basic = node.basic;
    if (node.children.empty() && !lang::has_refinement(node.refinement)) {
      info.kind = TypeInfo::Kind::Alias;
      info.aliasTarget = basic_symbol(node.basic);
      return;
    }
    info.kind = node.children.empty() ? TypeInfo::Kind::Refined : TypeInfo::Kind::Tree;
    if (lang::has_refinement(node.refinement)) {
      info_[symbol].refinement = &node.refinement;
      if (const auto* re = std::get_if<lang::RegexRefinement>(&node.refinement)) {
        std::string reSym = fresh(symbol + "-re");
        info_[symbol].reSym = reSym;
        Sexp sort = opts_.legacyNames
                        ? Sexp::list({Sexp::atom("RegEx"), Sexp::atom("String")})
                        : Sexp::atom("RegLan");
        decls_.add(Sexp::app("define-fun", {sym(reSym), Sexp::list({}), std::move(sort),
                                            regex::to_smt_sexp(*re->ast, opts_.legacyNames)}));
      }
    }
    std::vector<EncodedField> fields;
    for (const auto& f : node.children) {
      EncodedField ef{f.name, f.card, "", "", f.type.get()};
      if (f.card.is_single()) {
        ef.typeSymbol = symbol_for(*f.type, symbol + "." + f.name + "!t");
        ef.projection = fresh(symbol + "." + f.name);
        decls_.add(Sexp::app("declare-fun", {sym(ef.projection), Sexp::list({Sexp::atom("Term")}),
                                             Sexp::atom("Term")}));
        ++out_.stats.projectionFunctions;
      } else if (const auto* n = std::get_if<lang::TypeNamed>(&f.type->node)) {
        ef.typeSymbol = declSym_.at(n->name);
      } else if (const auto* bn = std::get_if<lang::TypeNode>(&f.type->node);
                 bn && bn->children.empty() && !lang::has_refinement(bn->refinement)) {
        ef.typeSymbol = basic_symbol(bn->basic);
      }
      fields.push_back(std::move(ef));
    }
    info_[symbol].fields = std::move(fields);
  }

  // Symbol denoting a field or alternative type: declared names and bare
  // basics are referenced directly, anything else becomes an anonymous
  // declaration named after its position.
  std::string symbol_for(const TypeExpr& t, const std::string& desired) {
    if (const auto* named = std::get_if<lang::TypeNamed>(&t.node)) return declSym_.at(named->name);
    if (const auto* node = std::get_if<lang::TypeNode>(&t.node))
      if (node->children.empty() && !lang::has_refinement(node->refinement))
        return basic_symbol(node->basic);
    std::string symbol = fresh(desired);
    declare_type(symbol, t);
    return symbol;
  }

  Sexp refinement_constraint(const lang::Refinement& r, const char* var, BasicKind basic) {
    if (std::holds_alternative<lang::RegexRefinement>(r)) {
      const TypeInfo& info = info_.at(current_axiom_symbol_);
      return Sexp::app(opts_.legacyNames ? "str.in.re" : "str.in_re",
                       {Sexp::app("string-term-val", {Sexp::atom(var)}), sym(info.reSym)});
    }
    const auto& pr = std::get<lang::PredicateRefinement>(r);
    Sexp subject = Sexp::app(unbox_symbol(basic), {Sexp::atom(var)});
    auto numSort = basic == BasicKind::Double ? pred::NumSort::Real : pred::NumSort::Int;
    return pred::to_smt(pr.ast.get(), subject, numSort);
  }

  void emit_type_axioms() {
    if (order_.empty()) {
      out_.base.items.insert(out_.base.items.end(), decls_.items.begin(), decls_.items.end());
      return;
    }
    SmtScript axioms;
    axioms.comment("typing axioms");
    for (const std::string& symbol : order_) {
      const TypeInfo& info = info_.at(symbol);
      current_axiom_symbol_ = symbol;
      switch (info.kind) {
        case TypeInfo::Kind::Basic:
          break;
        case TypeInfo::Kind::Alias: {
          Sexp body = Sexp::app("=", {Sexp::app("HasType", {Sexp::atom("x"), sym(symbol)}),
                                      Sexp::app("HasType", {Sexp::atom("x"), sym(info.aliasTarget)})});
          axioms.add(assert_cmd(forall1("x", "Term", std::move(body))));
          ++out_.stats.iffAxioms;
          break;
        }
        case TypeInfo::Kind::Refined: {
          Sexp constraint = refinement_constraint(*info.refinement, "x", info.basic);
          Sexp body = Sexp::app(
              "=", {Sexp::app("HasType", {Sexp::atom("x"), sym(symbol)}),
                    Sexp::app("and", {Sexp::app("HasType", {Sexp::atom("x"),
                                                            Sexp::atom(basic_symbol(info.basic))}),
                                      std::move(constraint)})});
          axioms.add(assert_cmd(forall1("x", "Term", std::move(body))));
          ++out_.stats.iffAxioms;
          break;
        }
        case TypeInfo::Kind::Tree: {
          std::vector<Sexp> parts;
          if (info.refinement) {
            parts.push_back(
                Sexp::app("HasType", {Sexp::atom("t"), Sexp::atom(basic_symbol(info.basic))}));
            parts.push_back(refinement_constraint(*info.refinement, "t", info.basic));
          }
          for (const auto& f : info.fields)
            if (!f.projection.empty())
              parts.push_back(
                  Sexp::app("HasType", {apply(f.projection, {Sexp::atom("t")}),
                                        sym(f.typeSymbol)}));
          if (parts.empty()) break;
          Sexp body = Sexp::app("=>", {Sexp::app("HasType", {Sexp::atom("t"), sym(symbol)}),
                                       and_of(std::move(parts))});
          axioms.add(assert_cmd(forall1("t", "Term", std::move(body))));
          ++out_.stats.implicationAxioms;
          break;
        }
        case TypeInfo::Kind::Choice: {
          std::vector<Sexp> alts;
          for (const auto& a : info.alternatives)
            alts.push_back(Sexp::app("HasType", {Sexp::atom("x"), sym(a)}));
          Sexp body = Sexp::app("=", {Sexp::app("HasType", {Sexp::atom("x"), sym(symbol)}),
                                      Sexp::app("or", std::move(alts))});
          axioms.add(assert_cmd(forall1("x", "Term", std::move(body))));
          ++out_.stats.iffAxioms;
          break;
        }
      }
    }
    auto& items = out_.base.items;
    items.insert(items.end(), decls_.items.begin(), decls_.items.end());
    if (axioms.items.size() > 1)
      items.insert(items.end(), axioms.items.begin(), axioms.items.end());
  }

  void op_type_symbol(const TypeExpr& t, std::string& symOut, std::string& displayOut) {
    if (const auto* named = std::get_if<lang::TypeNamed>(&t.node)) {
      symOut = declSym_.at(named->name);
      displayOut = named->name;
      return;
    }
    const auto& node = std::get<lang::TypeNode>(t.node);
    symOut = basic_symbol(node.basic);
    displayOut = symOut;
  }

  void encode_operations() {
    const auto& ops = rp_.program().operations;
    if (ops.empty()) return;
    out_.base.comment("operation signatures");
    for (const auto& op : ops) {
      OpInfo oi;
      oi.symbol = fresh(op.name);
      op_type_symbol(*op.request, oi.reqSym, oi.reqDisplay);
      op_type_symbol(*op.response, oi.respSym, oi.respDisplay);
      oi.req = op.request.get();
      oi.resp = op.response.get();
      out_.base.add(Sexp::app("declare-fun", {sym(oi.symbol), Sexp::list({Sexp::atom("Term")}),
                                              Sexp::atom("Term")}));
      opInfo_[op.name] = std::move(oi);
    }
    out_.base.comment("operation axioms");
    for (const auto& op : ops) {
      const OpInfo& oi = opInfo_.at(op.name);
      Sexp body = Sexp::app(
          "=>", {Sexp::app("HasType", {Sexp::atom("x"), sym(oi.reqSym)}),
                 Sexp::app("HasType", {apply(oi.symbol, {Sexp::atom("x")}), sym(oi.respSym)})});
      out_.base.add(assert_cmd(forall1("x", "Term", std::move(body))));
      ++out_.stats.operationAxioms;
    }
  }

  std::string canonical(std::string symbol) const {
    const TypeInfo* info = &info_.at(symbol);
    while (info->kind == TypeInfo::Kind::Alias) {
      symbol = info->aliasTarget;
      info = &info_.at(symbol);
    }
    return symbol;
  }

  bool has_field(const std::string& symbol, const std::string& name) const {
    const TypeInfo& info = info_.at(canonical(symbol));
    if (info.kind == TypeInfo::Kind::Tree) {
      for (const auto& f : info.fields)
        if (f.name == name) return true;
      return false;
    }
    if (info.kind == TypeInfo::Kind::Choice) {
      for (const auto& a : info.alternatives)
        if (!a.empty() && has_field(a, name)) return true;
    }
    return false;
  }

  struct Skolem {
    std::string symbol;
    std::string typeSym;
  };

  struct VarBind {
    Sexp term;
    std::vector<Skolem> skolems;
    bool broken = false;        // no usable term; skolemize on first use
    bool materialized = false;
    std::string typeSym;
    std::string typeDisplay;
    std::string name;
  };

  void generate_procedure(const lang::Procedure& proc) {
    const OpInfo& sig = opInfo_.at(proc.name);
    std::set<std::string> local = used_;
    auto localFresh = [&local](const std::string& desired) {
      std::string name = desired;
      for (int n = 1; local.count(name) || builtin_symbols().count(name); ++n)
        name = desired + "!" + std::to_string(n);
      local.insert(name);
      return name;
    };

    std::map<std::string, VarBind> env;
    {
      std::string t0 = localFresh("t0");
      VarBind vb;
      vb.term = Sexp::atom(t0);
      vb.skolems = {{t0, sig.reqSym}};
      vb.materialized = true;
      vb.typeSym = sig.reqSym;
      vb.typeDisplay = sig.reqDisplay;
      vb.name = proc.paramVar;
      env.emplace(proc.paramVar, std::move(vb));
    }

    for (std::size_t i = 0; i < proc.body.size(); ++i) {
      const lang::CallStmt& call = proc.body[i];
      const OpInfo& op = opInfo_.at(call.operation);
      std::string goal = "argument `" + lang::to_string(call.argument) + "` must have type " +
                         op.reqDisplay;

      VarBind& base = env.at(call.argument.base);
      if (base.broken && !base.materialized) {
        std::string sk = localFresh(base.name + "!sk");
        base.term = Sexp::atom(sk);
        base.skolems = {{sk, base.typeSym}};
        base.materialized = true;
      }

      enum class Outcome { Ok, Residual, PathError } outcome = Outcome::Ok;
      std::string reason, detail;
      Pos errPos;
      Sexp argTerm = base.term;
      std::string curSym = base.typeSym;
      for (std::size_t j = 0; j < call.argument.fields.size(); ++j) {
        const std::string& f = call.argument.fields[j];
        std::string canon = canonical(curSym);
        const TypeInfo& info = info_.at(canon);
        const EncodedField* field = nullptr;
        if (info.kind == TypeInfo::Kind::Tree)
          for (const auto& ef : info.fields)
            if (ef.name == f) field = &ef;
        if (info.kind == TypeInfo::Kind::Choice) {
          if (has_field(canon, f)) {
            outcome = Outcome::Residual;
            reason = "field `" + f + "` is reached through choice type `" + canon +
                     "`; checked dynamically";
          } else {
            outcome = Outcome::PathError;
            detail = "no alternative of choice type `" + canon + "` has a field `" + f + "`";
            errPos = call.argument.fieldPos[j];
          }
          break;
        }
        if (!field) {
          outcome = Outcome::PathError;
          detail = "type `" + canon + "` has no field `" + f + "`";
          errPos = call.argument.fieldPos[j];
          break;
        }
        if (!field->card.is_single()) {
          outcome = Outcome::Residual;
          reason = "field `" + f + "` has cardinality " + card_text(field->card) +
                   "; checked dynamically";
          break;
        }
        argTerm = apply(field->projection, {std::move(argTerm)});
        curSym = field->typeSymbol;
      }

      switch (outcome) {
        case Outcome::Ok: {
          Vc vc;
          vc.procedure = proc.name;
          vc.callIndex = i;
          vc.goalDescription = goal;
          vc.script = out_.base;
          vc.script.comment("verification condition: " + proc.name + ", call " +
                            std::to_string(i));
          vc.script.comment(goal);
          for (const Skolem& sk : base.skolems) {
            vc.script.add(
                Sexp::app("declare-fun", {sym(sk.symbol), Sexp::list({}), Sexp::atom("Term")}));
            vc.script.add(assert_cmd(Sexp::app("HasType", {sym(sk.symbol), sym(sk.typeSym)})));
          }
          vc.script.add(
              assert_cmd(Sexp::app("not", {Sexp::app("HasType", {argTerm, sym(op.reqSym)})})));
          vc.script.add(Sexp::app("check-sat", {}));
          out_.obligations.push_back(std::move(vc));
          break;
        }
        case Outcome::Residual:
          out_.obligations.push_back(ResidualCheck{proc.name, i, goal, reason});
          break;
        case Outcome::PathError:
          out_.obligations.push_back(StaticPathError{proc.name, i, goal, detail, errPos});
          break;
      }

      VarBind outBind;
      outBind.name = call.output;
      outBind.typeSym = op.respSym;
      outBind.typeDisplay = op.respDisplay;
      if (outcome == Outcome::Ok) {
        outBind.term = apply(op.symbol, {std::move(argTerm)});
        outBind.skolems = base.skolems;
        outBind.materialized = true;
      } else {
        outBind.broken = true;
      }
      env.insert_or_assign(call.output, std::move(outBind));
    }
  }

  const ResolvedProgram& rp_;
  EncodeOptions opts_;
  Encoded out_;
  std::set<std::string> used_;
  std::map<std::string, TypeInfo> info_;
  std::map<std::string, std::string> declSym_;
  std::map<std::string, OpInfo> opInfo_;
  std::vector<std::string> order_;
  SmtScript decls_;
  std::string current_axiom_symbol_;
};

}  // namespace

std::string SmtScript::render() const {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (const auto* c = std::get_if<Comment>(&items[i])) {
      if (i != 0 && !std::holds_alternative<Comment>(items[i - 1])) out += '\n';
      out += "; " + c->text + "\n";
    } else {
      out += std::get<smt::Sexp>(items[i]).pretty(0, 100) + "\n";
    }
  }
  return out;
}

SmtScript encode_prelude(const EncodeOptions& opts) {
  SmtScript s;
  s.add(Sexp::app("set-option", {Sexp::atom(":produce-models"), Sexp::atom("true")}));
  s.add(Sexp::app("set-option", {Sexp::atom(":timeout"), Sexp::atom(std::to_string(opts.timeoutMs))}));
  s.comment("sorts and the typing relation");
  s.add(Sexp::app("declare-sort", {Sexp::atom("Type"), Sexp::atom("0")}));
  s.add(Sexp::app("declare-sort", {Sexp::atom("Term"), Sexp::atom("0")}));
  s.add(Sexp::app("declare-fun", {Sexp::atom("HasType"),
                                  Sexp::list({Sexp::atom("Term"), Sexp::atom("Type")}),
                                  Sexp::atom("Bool")}));
  s.comment("boxed basic kinds");
  s.add(Sexp::app("declare-fun", {Sexp::atom("void"), Sexp::list({}), Sexp::atom("Type")}));
  s.add(Sexp::app("declare-fun", {Sexp::atom("UnitTerm"), Sexp::list({}), Sexp::atom("Term")}));
  s.add(assert_cmd(Sexp::app("HasType", {Sexp::atom("UnitTerm"), Sexp::atom("void")})));
  struct Kind {
    const char* type;
    const char* box;
    const char* unbox;
    const char* native;
  };
  for (const Kind& k : {Kind{"bool", "BoxBool", "bool-term-val", "Bool"},
                        Kind{"int", "BoxInt", "int-term-val", "Int"},
                        Kind{"double", "BoxDouble", "double-term-val", "Real"},
                        Kind{"string", "BoxString", "string-term-val", "String"}}) {
    s.add(Sexp::app("declare-fun", {Sexp::atom(k.type), Sexp::list({}), Sexp::atom("Type")}));
    s.add(Sexp::app("declare-fun",
                    {Sexp::atom(k.box), Sexp::list({Sexp::atom(k.native)}), Sexp::atom("Term")}));
    s.add(Sexp::app("declare-fun",
                    {Sexp::atom(k.unbox), Sexp::list({Sexp::atom("Term")}), Sexp::atom(k.native)}));
    s.add(assert_cmd(forall1(
        "v", k.native,
        Sexp::app("=", {Sexp::app(k.unbox, {Sexp::app(k.box, {Sexp::atom("v")})}),
                        Sexp::atom("v")}))));
    s.add(assert_cmd(forall1(
        "v", k.native,
        Sexp::app("HasType", {Sexp::app(k.box, {Sexp::atom("v")}), Sexp::atom(k.type)}))));
  }
  return s;
}

Encoded encode(const ResolvedProgram& program, const EncodeOptions& opts) {
  return Encoder(program, opts).run();
}

}  // namespace refcheck::enc
