#include <algorithm>
#include <functional>
#include <set>
#include <utility>

#include "refcheck/resolve.hpp"

namespace refcheck::lang {

ResolvedProgram::ResolvedProgram(Program p) : program_(std::move(p)) {
  for (std::size_t i = 0; i < program_.typeDecls.size(); ++i)
    types_.emplace(program_.typeDecls[i].name, i);
  for (std::size_t i = 0; i < program_.operations.size(); ++i)
    operations_.emplace(program_.operations[i].name, i);
}

const TypeDecl* ResolvedProgram::find_type(std::string_view name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : &program_.typeDecls[it->second];
}

const OpDecl* ResolvedProgram::find_operation(std::string_view name) const {
  auto it = operations_.find(name);
  return it == operations_.end() ? nullptr : &program_.operations[it->second];
}

DerefResult ResolvedProgram::deref(const TypeExpr& t) const {
  const TypeExpr* cur = &t;
  std::string last;
  while (const auto* named = std::get_if<TypeExpr::Named>(&cur->node)) {
    const TypeDecl* decl = find_type(named->name);
    if (!decl) return {nullptr, named->name};  // resolve() rules this out
    last = named->name;
    cur = decl->body.get();
  }
  return {cur, std::move(last)};
}

namespace {

// every Named reference in an expression, without following declarations
void each_reference(const TypeExpr& t,
                    const std::function<void(const TypeExpr::Named&, Pos)>& fn) {
  if (const auto* named = std::get_if<TypeExpr::Named>(&t.node)) {
    fn(*named, t.pos);
    return;
  }
  if (const auto* choice = std::get_if<TypeExpr::Choice>(&t.node)) {
    for (const auto& alt : choice->alternatives) each_reference(*alt, fn);
    return;
  }
  const auto& node = std::get<TypeExpr::Node>(t.node);
  for (const auto& field : node.children) each_reference(*field.type, fn);
}

class Checker {
 public:
  explicit Checker(const ResolvedProgram& rp) : rp_(rp) {}

  std::vector<Diagnostic> run() {
    const Program& prog = rp_.program();
    for (const auto& decl : prog.typeDecls) check_references(*decl.body);
    for (const auto& op : prog.operations) {
      check_references(*op.request);
      check_references(*op.response);
    }
    check_cycles();
    for (const auto& proc : prog.procedures) check_procedure(proc);
    return std::move(diags_);
  }

 private:
  const ResolvedProgram& rp_;
  std::vector<Diagnostic> diags_;

  void report(ErrKind kind, Pos pos, std::string message) {
    diags_.push_back({kind, pos, std::move(message)});
  }

  void check_references(const TypeExpr& t) {
    each_reference(t, [this](const TypeExpr::Named& named, Pos pos) {
      if (!rp_.find_type(named.name))
        report(ErrKind::UnresolvedName, pos, "unknown type name `" + named.name + "`");
    });
  }

  // A declaration reaching itself through any chain of references (child
  // fields included, whatever the cardinality) is rejected: the encoding
  // has no axioms for recursive types.
  void check_cycles() {
    enum class Color { White, Gray, Black };
    std::map<std::string, Color> color;
    std::vector<std::string> stack;

    std::function<void(const TypeDecl&)> visit = [&](const TypeDecl& decl) {
      color[decl.name] = Color::Gray;
      stack.push_back(decl.name);
      each_reference(*decl.body, [&](const TypeExpr::Named& named, Pos) {
        const TypeDecl* target = rp_.find_type(named.name);
        if (!target) return;
        Color c = color.count(named.name) ? color[named.name] : Color::White;
        if (c == Color::White) {
          visit(*target);
        } else if (c == Color::Gray) {
          std::string path;
          auto it = std::find(stack.begin(), stack.end(), named.name);
          for (; it != stack.end(); ++it) path += *it + " -> ";
          path += named.name;
          report(ErrKind::RecursiveType, decl.pos, "definition cycles back to itself: " + path);
        }
      });
      stack.pop_back();
      color[decl.name] = Color::Black;
    };

    for (const auto& decl : rp_.program().typeDecls) {
      Color c = color.count(decl.name) ? color[decl.name] : Color::White;
      if (c == Color::White) visit(decl);
    }
  }

  void check_procedure(const Procedure& proc) {
    if (!rp_.signature_of(proc))
      report(ErrKind::UnresolvedName, proc.pos,
             "no operation signature for procedure `" + proc.name +
                 "`; declare `operation " + proc.name + "(...)(...)`");
    std::set<std::string> defined{proc.paramVar};
    for (const auto& call : proc.body) {
      if (!rp_.find_operation(call.operation))
        report(ErrKind::UnresolvedName, call.pos,
               "unknown operation `" + call.operation + "`");
      if (!defined.count(call.argument.base))
        report(ErrKind::UndefinedVariable, call.argument.pos,
               "variable `" + call.argument.base + "` is not defined at this point");
      defined.insert(call.output);
    }
  }
};

}  // namespace

ResolvedProgram resolve(Program p) {
  ResolvedProgram rp(std::move(p));
  std::vector<Diagnostic> diags = Checker(rp).run();
  if (!diags.empty()) throw CompileError(std::move(diags));
  return rp;
}

}  // namespace refcheck::lang
