#pragma once

#include <map>
#include <string_view>

#include "refcheck/ast.hpp"

namespace refcheck::lang {

/// A reference chain followed to the expression that defines it.
struct DerefResult {
  const TypeExpr* type = nullptr;  // Node or Choice, never Named
  std::string name;                // last declaration name on the chain; empty if inline
};

/// Program plus name lookups. References into the held Program stay valid
/// for the lifetime of this object; it is movable but deliberately not
/// copyable.
class ResolvedProgram {
 public:
  explicit ResolvedProgram(Program p);
  ResolvedProgram(ResolvedProgram&&) noexcept = default;
  ResolvedProgram& operator=(ResolvedProgram&&) noexcept = default;
  ResolvedProgram(const ResolvedProgram&) = delete;
  ResolvedProgram& operator=(const ResolvedProgram&) = delete;

  const Program& program() const { return program_; }
  const TypeDecl* find_type(std::string_view name) const;
  const OpDecl* find_operation(std::string_view name) const;
  /// The operation that gives a procedure its parameter type.
  const OpDecl* signature_of(const Procedure& proc) const { return find_operation(proc.name); }

  DerefResult deref(const TypeExpr& t) const;

 private:
  Program program_;
  std::map<std::string, std::size_t, std::less<>> types_;
  std::map<std::string, std::size_t, std::less<>> operations_;

  friend ResolvedProgram resolve(Program p);
};

/// Checks every named reference, rejects recursive type definitions, and
/// verifies procedure dataflow (each path base is the parameter or an
/// earlier output; each call and each procedure has an operation
/// signature). Collects all diagnostics before throwing CompileError.
ResolvedProgram resolve(Program p);

}  // namespace refcheck::lang
