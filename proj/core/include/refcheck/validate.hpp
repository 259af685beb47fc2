#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "refcheck/ast.hpp"
#include "refcheck/resolve.hpp"
#include "refcheck/value.hpp"

namespace refcheck::val {

enum class ErrorKind {
  MissingField,
  CardinalityViolation,
  BasicKindMismatch,
  RegexViolation,
  PredicateViolation,
  NoChoiceBranch,
  UnexpectedField,
};

/// Stable kebab-case identifier, used in the JSON rendering.
std::string_view kind_slug(ErrorKind kind);

struct PathStep {
  std::string field;
  std::size_t index = 0;
  bool indexed = false;  // true for repeatable fields: print field[index]
};

struct ValidationError {
  std::vector<PathStep> path;  // empty = the root node
  ErrorKind kind;
  std::string message;   // one human-readable line, path not included
  std::string expected;  // cardinality, basic kind, pattern or predicate text
  std::string found;     // offending value, kind or count
  std::vector<std::string> alternatives;  // per-branch summaries (NoChoiceBranch)
};

/// ".post[2].pid" style; the bare root is "$".
std::string path_string(const std::vector<PathStep>& path);

/// "/post/2/pid" style, indices interleaved for repeated fields; the root
/// is the empty pointer "".
std::string json_pointer(const std::vector<PathStep>& path);

struct ValidateOptions {
  bool openWorld = false;       // accept fields the type does not declare
  std::size_t maxErrors = 256;  // collection cap per validation
};

/// Checks v against t, resolving named references through rp. Returns
/// every violation found (depth-first, declaration order), empty when v
/// inhabits t. Never throws: all outcomes are data.
std::vector<ValidationError> validate(const ValueTree& v, const lang::TypeExpr& t,
                                      const lang::ResolvedProgram& rp,
                                      const ValidateOptions& opts = {});

/// JSON array rendering of an error list, schema documented in
/// docs/report-schema.md. indent < 0 renders compact.
std::string errors_to_json(const std::vector<ValidationError>& errors, int indent = 2);

}  // namespace refcheck::val
