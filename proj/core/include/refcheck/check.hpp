#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "refcheck/encode.hpp"
#include "refcheck/resolve.hpp"
#include "refcheck/solver.hpp"

namespace refcheck::chk {

struct CheckConfig {
  solver::SolverConfig solver;
  bool legacyNames = false;
  int jobs = 0;  // parallel VC workers; 0 = one per hardware thread
};

/// Outcome classes for one call site. Exactly one verdict per refinement
/// obligation; nothing the encoder produced is dropped.
struct WellTyped {};
struct IllTyped {
  std::string rawModel;  // solver counterexample; empty for path errors
};
struct NotVerified {
  std::string reason;  // "timeout", "unknown" or "solver-error"
};
struct DynamicOnly {};

struct CallSiteVerdict {
  std::string procedure;
  std::size_t callIndex = 0;
  std::string goalDescription;
  std::variant<WellTyped, IllTyped, NotVerified, DynamicOnly> status;
  std::string note;       // reason detail, residual description or path error
  double elapsedMs = 0;   // solver wall time; 0 for verdicts without a solver run
};

const char* status_name(const CallSiteVerdict& v);  // "well-typed" etc

struct ResidualEntry {
  std::string procedure;
  std::size_t callIndex = 0;
  std::string description;
};

struct Summary {
  std::size_t wellTyped = 0;
  std::size_t illTyped = 0;
  std::size_t notVerified = 0;
  std::size_t dynamicOnly = 0;
  std::size_t total() const { return wellTyped + illTyped + notVerified + dynamicOnly; }
};

struct Report {
  std::string source;  // display name of the checked file
  std::vector<CallSiteVerdict> verdicts;  // sorted by (procedure order, callIndex)
  Summary summary;
  /// Call sites to re-check at runtime: every DynamicOnly site plus every
  /// NotVerified site (the solver gave no proof, so the boundary must).
  std::vector<ResidualEntry> residualChecks;
};

/// Exit status for the report: 0 all proved or deferred, 1 some call site
/// is ill-typed, 2 some call site could not be verified (and none is
/// ill-typed).
int exit_code(const Report& report);

/// Encodes rp and discharges every verification condition with the
/// configured solver, fanning out across worker threads. Throws
/// CompileError (IoError) when VCs exist but the solver executable cannot
/// be found.
Report run_check(const lang::ResolvedProgram& rp, const CheckConfig& cfg,
                 std::string sourceName = {});

/// Writes prelude.smt2 plus one self-contained <procedure>.<callIndex>.smt2
/// per verification condition into outDir (created if needed). Returns the
/// file names written, in order. Throws CompileError (IoError) on failure.
std::vector<std::string> write_smt_files(const enc::Encoded& encoded,
                                         const std::string& outDir);

std::string report_to_text(const Report& report);
std::string report_to_json(const Report& report, int indent = 2);

}  // namespace refcheck::chk
