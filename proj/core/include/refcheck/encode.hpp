#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "refcheck/resolve.hpp"
#include "refcheck/sexp.hpp"

namespace refcheck::enc {

struct EncodeOptions {
  bool legacyNames = false;  // str.in.re / (RegEx String) spellings
  int timeoutMs = 10000;     // forwarded to the script's :timeout option
};

/// Ordered SMT-LIB commands with interleaved comments. Rendering is
/// deterministic so scripts can be golden-tested byte for byte.
struct SmtScript {
  struct Comment {
    std::string text;
  };
  using Item = std::variant<smt::Sexp, Comment>;
  std::vector<Item> items;

  void add(smt::Sexp cmd) { items.push_back(std::move(cmd)); }
  void comment(std::string text) { items.push_back(Comment{std::move(text)}); }
  std::string render() const;
};

struct AxiomStats {
  std::size_t iffAxioms = 0;          // refined basics, aliases, choices
  std::size_t implicationAxioms = 0;  // tree types
  std::size_t projectionFunctions = 0;
  std::size_t operationAxioms = 0;
};

/// One call site whose well-typedness reduces to an unsat check.
struct Vc {
  std::string procedure;
  std::size_t callIndex = 0;  // position of the call within the procedure
  std::string goalDescription;
  SmtScript script;  // self-contained, ends in (check-sat)
};

/// A call site the static phase cannot decide; the obligation is handed to
/// the dynamic validator instead.
struct ResidualCheck {
  std::string procedure;
  std::size_t callIndex = 0;
  std::string goalDescription;
  std::string reason;
};

/// A projection that cannot exist: the addressed type has no such field in
/// any form. Reported without solver involvement.
struct StaticPathError {
  std::string procedure;
  std::size_t callIndex = 0;
  std::string goalDescription;
  std::string detail;
  Pos pos;
};

using Obligation = std::variant<Vc, ResidualCheck, StaticPathError>;

struct Encoded {
  /// Prelude plus every type and operation axiom; the shared prefix of all
  /// VC scripts, and what `emit-smt` writes as prelude.smt2.
  SmtScript base;
  /// Exactly one entry per call site, in program order.
  std::vector<Obligation> obligations;
  AxiomStats stats;
};

/// Sorts, the HasType relation and the boxed basic kinds.
SmtScript encode_prelude(const EncodeOptions& opts = {});

Encoded encode(const lang::ResolvedProgram& program, const EncodeOptions& opts = {});

}  // namespace refcheck::enc
