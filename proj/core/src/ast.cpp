#include <utility>

#include "refcheck/ast.hpp"

namespace refcheck::lang {

std::string_view to_string(BasicKind kind) {
  switch (kind) {
    case BasicKind::Void: return "void";
    case BasicKind::Bool: return "bool";
    case BasicKind::Int: return "int";
    case BasicKind::Double: return "double";
    case BasicKind::String: return "string";
  }
  return "void";
}

std::string to_string(const Path& path) {
  std::string out = path.base;
  for (const auto& field : path.fields) {
    out += '.';
    out += field;
  }
  return out;
}

namespace {

bool refinement_equal(const Refinement& a, const Refinement& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<RegexRefinement>(a)) {
    return regex::structurally_equal(*std::get<RegexRefinement>(a).ast,
                                     *std::get<RegexRefinement>(b).ast);
  }
  if (std::holds_alternative<PredicateRefinement>(a)) {
    return pred::structurally_equal(*std::get<PredicateRefinement>(a).ast,
                                    *std::get<PredicateRefinement>(b).ast);
  }
  return true;
}

}  // namespace

bool structurally_equal(const TypeExpr& a, const TypeExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<TypeExpr::Named>(a.node)) {
    return std::get<TypeExpr::Named>(a.node).name == std::get<TypeExpr::Named>(b.node).name;
  }
  if (std::holds_alternative<TypeExpr::Choice>(a.node)) {
    const auto& ca = std::get<TypeExpr::Choice>(a.node);
    const auto& cb = std::get<TypeExpr::Choice>(b.node);
    if (ca.alternatives.size() != cb.alternatives.size()) return false;
    for (std::size_t i = 0; i < ca.alternatives.size(); ++i)
      if (!structurally_equal(*ca.alternatives[i], *cb.alternatives[i])) return false;
    return true;
  }
  const auto& na = std::get<TypeExpr::Node>(a.node);
  const auto& nb = std::get<TypeExpr::Node>(b.node);
  if (na.basic != nb.basic || !refinement_equal(na.refinement, nb.refinement)) return false;
  if (na.children.size() != nb.children.size()) return false;
  for (std::size_t i = 0; i < na.children.size(); ++i) {
    const auto& fa = na.children[i];
    const auto& fb = nb.children[i];
    if (fa.name != fb.name || !(fa.card == fb.card) || !structurally_equal(*fa.type, *fb.type))
      return false;
  }
  return true;
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.typeDecls.size() != b.typeDecls.size() || a.operations.size() != b.operations.size() ||
      a.procedures.size() != b.procedures.size())
    return false;
  for (std::size_t i = 0; i < a.typeDecls.size(); ++i) {
    if (a.typeDecls[i].name != b.typeDecls[i].name ||
        !structurally_equal(*a.typeDecls[i].body, *b.typeDecls[i].body))
      return false;
  }
  for (std::size_t i = 0; i < a.operations.size(); ++i) {
    const auto& oa = a.operations[i];
    const auto& ob = b.operations[i];
    if (oa.name != ob.name || !structurally_equal(*oa.request, *ob.request) ||
        !structurally_equal(*oa.response, *ob.response))
      return false;
  }
  for (std::size_t i = 0; i < a.procedures.size(); ++i) {
    const auto& pa = a.procedures[i];
    const auto& pb = b.procedures[i];
    if (pa.name != pb.name || pa.paramVar != pb.paramVar || pa.body.size() != pb.body.size())
      return false;
    for (std::size_t j = 0; j < pa.body.size(); ++j) {
      const auto& ca = pa.body[j];
      const auto& cb = pb.body[j];
      if (ca.operation != cb.operation || ca.output != cb.output ||
          ca.argument.base != cb.argument.base || ca.argument.fields != cb.argument.fields)
        return false;
    }
  }
  return true;
}

namespace {

std::string escape_string_literal(const std::string& content) {
  std::string out;
  out.reserve(content.size() + 2);
  out += '"';
  for (char c : content) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

void print_type(std::string& out, const TypeExpr& t, int indent);

void print_node(std::string& out, const TypeExpr::Node& node, int indent) {
  out += to_string(node.basic);
  if (std::holds_alternative<RegexRefinement>(node.refinement)) {
    out += '(';
    out += escape_string_literal(std::get<RegexRefinement>(node.refinement).pattern);
    out += ')';
  } else if (std::holds_alternative<PredicateRefinement>(node.refinement)) {
    out += '(';
    out += std::get<PredicateRefinement>(node.refinement).text;
    out += ')';
  }
  if (node.children.empty()) return;
  out += " {\n";
  std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  for (const auto& field : node.children) {
    out += pad;
    out += '.';
    out += field.name;
    if (field.card == Cardinality{0, std::nullopt}) {
      out += '*';
    } else if (field.card == Cardinality{0, 1}) {
      out += '?';
    }
    out += ": ";
    print_type(out, *field.type, indent + 2);
    out += '\n';
  }
  out.append(static_cast<std::size_t>(indent), ' ');
  out += '}';
}

void print_type(std::string& out, const TypeExpr& t, int indent) {
  if (std::holds_alternative<TypeExpr::Named>(t.node)) {
    out += std::get<TypeExpr::Named>(t.node).name;
    return;
  }
  if (std::holds_alternative<TypeExpr::Choice>(t.node)) {
    const auto& choice = std::get<TypeExpr::Choice>(t.node);
    bool first = true;
    for (const auto& alt : choice.alternatives) {
      if (!first) out += " | ";
      first = false;
      print_type(out, *alt, indent);
    }
    return;
  }
  print_node(out, std::get<TypeExpr::Node>(t.node), indent);
}

}  // namespace

std::string pretty_print(const Program& p) {
  std::string out;
  for (const auto& decl : p.typeDecls) {
    out += "type ";
    out += decl.name;
    out += ": ";
    print_type(out, *decl.body, 0);
    out += '\n';
  }
  if (!p.operations.empty() && !out.empty()) out += '\n';
  for (const auto& op : p.operations) {
    out += "operation ";
    out += op.name;
    out += '(';
    print_type(out, *op.request, 0);
    out += ")(";
    print_type(out, *op.response, 0);
    out += ")\n";
  }
  if (!p.procedures.empty()) {
    if (!out.empty()) out += '\n';
    out += "main {\n";
    bool first = true;
    for (const auto& proc : p.procedures) {
      if (!first) out += '\n';
      first = false;
      out += "  ";
      out += proc.name;
      out += '(';
      out += proc.paramVar;
      out += ") {\n";
      for (const auto& call : proc.body) {
        out += "    ";
        out += call.operation;
        out += '(';
        out += to_string(call.argument);
        out += ")(";
        out += call.output;
        out += ")\n";
      }
      out += "  }\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace refcheck::lang
