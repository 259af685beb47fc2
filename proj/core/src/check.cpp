#include "refcheck/check.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>
#include <utility>

namespace refcheck::chk {

namespace {

struct VcJob {
  const enc::Vc* vc = nullptr;
  std::string script;           // rendered up front, shared with workers read-only
  solver::SolverVerdict verdict = solver::SolverError{"not run"};
  double elapsedMs = 0;
};

void run_jobs(std::vector<VcJob>& jobs, const CheckConfig& cfg) {
  if (jobs.empty()) return;
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = cfg.jobs > 0 ? static_cast<std::size_t>(cfg.jobs)
                                     : std::max(1u, hw ? hw : 1u);
  workers = std::min(workers, jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      auto start = std::chrono::steady_clock::now();
      jobs[i].verdict = solver::run_script(cfg.solver, jobs[i].script);
      jobs[i].elapsedMs =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
    }
  };

  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

CallSiteVerdict verdict_for(const VcJob& job) {
  CallSiteVerdict out;
  out.procedure = job.vc->procedure;
  out.callIndex = job.vc->callIndex;
  out.goalDescription = job.vc->goalDescription;
  out.elapsedMs = job.elapsedMs;
  if (std::holds_alternative<solver::Unsat>(job.verdict)) {
    out.status = WellTyped{};
  } else if (const auto* sat = std::get_if<solver::Sat>(&job.verdict)) {
    out.status = IllTyped{sat->rawModel};
  } else if (const auto* unk = std::get_if<solver::Unknown>(&job.verdict)) {
    out.status = NotVerified{"unknown"};
    out.note = unk->reason;
  } else if (std::holds_alternative<solver::Timeout>(job.verdict)) {
    out.status = NotVerified{"timeout"};
  } else {
    out.status = NotVerified{"solver-error"};
    out.note = std::get<solver::SolverError>(job.verdict).detail;
  }
  return out;
}

std::string format_ms(double ms) {
  char buf[32];
  if (ms >= 1000)
    std::snprintf(buf, sizeof buf, "%.2f s", ms / 1000.0);
  else
    std::snprintf(buf, sizeof buf, "%.0f ms", ms);
  return buf;
}

}  // namespace

const char* status_name(const CallSiteVerdict& v) {
  switch (v.status.index()) {
    case 0: return "well-typed";
    case 1: return "ill-typed";
    case 2: return "not-verified";
    default: return "dynamic-only";
  }
}

int exit_code(const Report& report) {
  if (report.summary.illTyped > 0) return 1;
  if (report.summary.notVerified > 0) return 2;
  return 0;
}

Report run_check(const lang::ResolvedProgram& rp, const CheckConfig& cfg,
                 std::string sourceName) {
  enc::EncodeOptions encOpts;
  encOpts.legacyNames = cfg.legacyNames;
  encOpts.timeoutMs = cfg.solver.timeoutMs;
  enc::Encoded encoded = enc::encode(rp, encOpts);

  std::vector<VcJob> jobs;
  for (const auto& ob : encoded.obligations)
    if (const auto* vc = std::get_if<enc::Vc>(&ob))
      jobs.push_back(VcJob{vc, vc->script.render(), {}, 0});

  if (!jobs.empty()) {
    std::string detail;
    if (!solver::solver_available(cfg.solver, &detail))
      fail(ErrKind::IoError, {},
           detail + "; install z3, pass --solver-path, or set REFCHECK_SOLVER");
  }
  run_jobs(jobs, cfg);

  Report report;
  report.source = std::move(sourceName);
  std::size_t jobAt = 0;
  for (const auto& ob : encoded.obligations) {
    if (std::holds_alternative<enc::Vc>(ob)) {
      report.verdicts.push_back(verdict_for(jobs[jobAt++]));
      continue;
    }
    if (const auto* res = std::get_if<enc::ResidualCheck>(&ob)) {
      CallSiteVerdict v;
      v.procedure = res->procedure;
      v.callIndex = res->callIndex;
      v.goalDescription = res->goalDescription;
      v.status = DynamicOnly{};
      v.note = res->reason;
      report.verdicts.push_back(std::move(v));
      continue;
    }
    // a projection into a field that cannot exist is ill-typed outright,
    // no solver needed
    const auto& pe = std::get<enc::StaticPathError>(ob);
    CallSiteVerdict v;
    v.procedure = pe.procedure;
    v.callIndex = pe.callIndex;
    v.goalDescription = pe.goalDescription;
    v.status = IllTyped{};
    v.note = pe.detail;
    report.verdicts.push_back(std::move(v));
  }

  // the pool may finish in any order; pin the report to program order
  std::map<std::string, std::size_t> procOrder;
  for (const auto& v : report.verdicts)
    procOrder.emplace(v.procedure, procOrder.size());
  std::stable_sort(report.verdicts.begin(), report.verdicts.end(),
                   [&](const CallSiteVerdict& a, const CallSiteVerdict& b) {
                     auto ka = std::pair(procOrder[a.procedure], a.callIndex);
                     auto kb = std::pair(procOrder[b.procedure], b.callIndex);
                     return ka < kb;
                   });

  for (const auto& v : report.verdicts) {
    switch (v.status.index()) {
      case 0: report.summary.wellTyped++; break;
      case 1: report.summary.illTyped++; break;
      case 2: report.summary.notVerified++; break;
      default: report.summary.dynamicOnly++; break;
    }
    if (std::holds_alternative<DynamicOnly>(v.status) ||
        std::holds_alternative<NotVerified>(v.status)) {
      std::string desc = v.note.empty() ? v.goalDescription : v.note;
      if (std::holds_alternative<NotVerified>(v.status))
        desc = v.goalDescription + " (static proof " +
               std::get<NotVerified>(v.status).reason + ")";
      report.residualChecks.push_back(ResidualEntry{v.procedure, v.callIndex, desc});
    }
  }
  return report;
}

std::vector<std::string> write_smt_files(const enc::Encoded& encoded,
                                         const std::string& outDir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) fail(ErrKind::IoError, {}, "cannot create `" + outDir + "`: " + ec.message());

  auto write_one = [&](const std::string& name, const std::string& text) {
    fs::path p = fs::path(outDir) / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    out.close();
    if (!out) fail(ErrKind::IoError, {}, "cannot write `" + p.string() + "`");
  };

  std::vector<std::string> written;
  write_one("prelude.smt2", encoded.base.render());
  written.push_back("prelude.smt2");
  for (const auto& ob : encoded.obligations) {
    const auto* vc = std::get_if<enc::Vc>(&ob);
    if (!vc) continue;
    std::string name = vc->procedure + "." + std::to_string(vc->callIndex) + ".smt2";
    write_one(name, vc->script.render());
    written.push_back(std::move(name));
  }
  return written;
}

std::string report_to_text(const Report& report) {
  std::string out;
  if (!report.source.empty()) out += report.source + ": ";
  out += std::to_string(report.summary.total()) + " call site" +
         (report.summary.total() == 1 ? "" : "s") + "\n";

  for (const auto& v : report.verdicts) {
    out += "  " + v.procedure + " call " + std::to_string(v.callIndex) + ": ";
    out += status_name(v);
    if (v.elapsedMs > 0) out += " (" + format_ms(v.elapsedMs) + ")";
    out += "\n    " + v.goalDescription + "\n";
    if (const auto* nv = std::get_if<NotVerified>(&v.status)) {
      out += "    reason: " + nv->reason;
      if (!v.note.empty()) out += " (" + v.note + ")";
      out += "\n";
    } else if (!v.note.empty()) {
      out += "    " + v.note + "\n";
    }
    if (const auto* ill = std::get_if<IllTyped>(&v.status); ill && !ill->rawModel.empty()) {
      out += "    counterexample model:\n";
      std::size_t lines = 0, pos = 0;
      while (pos < ill->rawModel.size() && lines < 20) {
        std::size_t nl = ill->rawModel.find('\n', pos);
        if (nl == std::string::npos) nl = ill->rawModel.size();
        out += "      " + ill->rawModel.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
        ++lines;
      }
      if (pos < ill->rawModel.size()) out += "      ...\n";
    }
  }

  out += "summary: " + std::to_string(report.summary.wellTyped) + " well-typed, " +
         std::to_string(report.summary.illTyped) + " ill-typed, " +
         std::to_string(report.summary.notVerified) + " not-verified, " +
         std::to_string(report.summary.dynamicOnly) + " dynamic-only\n";

  if (!report.residualChecks.empty()) {
    out += "residual dynamic checks:\n";
    for (const auto& r : report.residualChecks)
      out += "  " + r.procedure + " call " + std::to_string(r.callIndex) + ": " +
             r.description + "\n";
  }
  return out;
}

std::string report_to_json(const Report& report, int indent) {
  nlohmann::ordered_json j;
  j["source"] = report.source;
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : report.verdicts) {
    nlohmann::ordered_json o;
    o["procedure"] = v.procedure;
    o["callIndex"] = v.callIndex;
    o["goal"] = v.goalDescription;
    o["status"] = status_name(v);
    if (const auto* nv = std::get_if<NotVerified>(&v.status)) o["reason"] = nv->reason;
    if (!v.note.empty()) o["note"] = v.note;
    if (const auto* ill = std::get_if<IllTyped>(&v.status); ill && !ill->rawModel.empty())
      o["model"] = ill->rawModel;
    if (v.elapsedMs > 0) o["elapsedMs"] = v.elapsedMs;
    verdicts.push_back(std::move(o));
  }
  j["verdicts"] = std::move(verdicts);
  j["summary"] = {{"wellTyped", report.summary.wellTyped},
                  {"illTyped", report.summary.illTyped},
                  {"notVerified", report.summary.notVerified},
                  {"dynamicOnly", report.summary.dynamicOnly},
                  {"total", report.summary.total()}};
  auto residual = nlohmann::ordered_json::array();
  for (const auto& r : report.residualChecks)
    residual.push_back({{"procedure", r.procedure},
                        {"callIndex", r.callIndex},
                        {"description", r.description}});
  j["residualChecks"] = std::move(residual);
  j["exitCode"] = exit_code(report);
  return j.dump(indent);
}

}  // namespace refcheck::chk
