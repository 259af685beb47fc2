#include "refcheck/diagnostics.hpp"

#include <sstream>
#include <utility>

namespace refcheck {

const char* to_string(ErrKind kind) {
  switch (kind) {
    case ErrKind::SyntaxError: return "syntax error";
    case ErrKind::DuplicateName: return "duplicate name";
    case ErrKind::BadRefinement: return "bad refinement";
    case ErrKind::UnsupportedConstruct: return "unsupported construct";
    case ErrKind::NumberOutOfRange: return "number out of range";
    case ErrKind::UnresolvedName: return "unresolved name";
    case ErrKind::RecursiveType: return "recursive type";
    case ErrKind::UndefinedVariable: return "undefined variable";
    case ErrKind::UnknownVariable: return "unknown variable";
    case ErrKind::NonlinearTerm: return "nonlinear term";
    case ErrKind::JsonSyntaxError: return "json syntax error";
    case ErrKind::NestingTooDeep: return "nesting too deep";
    case ErrKind::UnknownTypeName: return "unknown type name";
    case ErrKind::IoError: return "io error";
  }
  return "error";
}

std::string Diagnostic::format() const {
  std::ostringstream out;
  if (pos.known()) out << pos.line << ':' << pos.col << ": ";
  out << to_string(kind) << ": " << message;
  return out.str();
}

static std::string format_all(const std::vector<Diagnostic>& diags) {
  std::ostringstream out;
  for (std::size_t i = 0; i < diags.size(); ++i) {
    if (i) out << '\n';
    out << diags[i].format();
  }
  return out.str();
}

CompileError::CompileError(Diagnostic diag)
    : diags_{std::move(diag)}, formatted_(format_all(diags_)) {}

CompileError::CompileError(std::vector<Diagnostic> diags)
    : diags_(std::move(diags)), formatted_(format_all(diags_)) {}

void fail(ErrKind kind, Pos pos, std::string message) {
  throw CompileError(Diagnostic{kind, pos, std::move(message)});
}

}  // namespace refcheck
