#pragma once

#include <exception>
#include <string>
#include <vector>

namespace refcheck {

/// Source position, 1-based. line == 0 means "no position".
struct Pos {
  int line = 0;
  int col = 0;

  bool known() const { return line > 0; }
};

enum class ErrKind {
  SyntaxError,
  DuplicateName,
  BadRefinement,
  UnsupportedConstruct,
  NumberOutOfRange,
  UnresolvedName,
  RecursiveType,
  UndefinedVariable,
  UnknownVariable,
  NonlinearTerm,
  JsonSyntaxError,
  NestingTooDeep,
  UnknownTypeName,
  IoError,
};

const char* to_string(ErrKind kind);

struct Diagnostic {
  ErrKind kind = ErrKind::SyntaxError;
  Pos pos;
  std::string message;

  /// "3:14: syntax error: expected ':'", without a file name; the CLI
  /// prefixes the path.
  std::string format() const;
};

/// Carrier for one or more diagnostics. Parsing stops at the first error;
/// resolution collects everything it can before throwing.
class CompileError : public std::exception {
 public:
  explicit CompileError(Diagnostic diag);
  explicit CompileError(std::vector<Diagnostic> diags);

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }
  const Diagnostic& first() const { return diags_.front(); }
  const char* what() const noexcept override { return formatted_.c_str(); }

 private:
  std::vector<Diagnostic> diags_;
  std::string formatted_;
};

[[noreturn]] void fail(ErrKind kind, Pos pos, std::string message);

}  // namespace refcheck
