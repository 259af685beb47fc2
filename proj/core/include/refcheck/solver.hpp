#pragma once

#include <string>
#include <variant>
#include <vector>

namespace refcheck::solver {

struct SolverConfig {
  std::string executablePath = "z3";
  int timeoutMs = 10000;  // solver :timeout is advisory; the process kill is authoritative
  std::vector<std::string> extraArgs;
  bool captureModel = true;  // append (get-info :reason-unknown) and (get-model)
};

struct Unsat {};
struct Sat {
  std::string rawModel;
};
struct Unknown {
  std::string reason;
};
struct Timeout {};
struct SolverError {
  std::string detail;
};

using SolverVerdict = std::variant<Unsat, Sat, Unknown, Timeout, SolverError>;

const char* verdict_name(const SolverVerdict& v);

/// Feeds one complete SMT-LIB document to a fresh solver process and maps
/// the first status line to a verdict. The child is killed (and Timeout
/// returned) no later than timeoutMs + 2000ms; a solver-reported `unknown`
/// whose reason is a timeout or cancellation maps to Timeout as well.
SolverVerdict run_script(const SolverConfig& cfg, const std::string& script);

/// True when the configured executable exists and is runnable; on failure
/// `detail` (when given) receives a one-line explanation.
bool solver_available(const SolverConfig& cfg, std::string* detail = nullptr);

}  // namespace refcheck::solver
