#include <doctest.h>

#include "refcheck/encode.hpp"
#include "refcheck/solver.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/stat.h>

using namespace refcheck;
using solver::SolverConfig;
using solver::SolverVerdict;

namespace {

SolverConfig quick_config(int timeoutMs = 20000) {
    SolverConfig cfg;
    cfg.timeoutMs = timeoutMs;
    return cfg;
}

bool have_solver() {
    static const bool ok = solver::solver_available(SolverConfig{});
    return ok;
}

// Writes a fake "solver" that ignores its input and sleeps, for kill-path tests.
std::string write_stall_script() {
    std::string path = "/tmp/refcheck_stall_solver.sh";
    {
        std::ofstream out(path);
        out << "#!/bin/sh\nsleep 30\n";
    }
    ::chmod(path.c_str(), 0755);
    return path;
}

} // namespace

TEST_CASE("trivially unsat script") {
    if (!have_solver())
        return;
    auto v = solver::run_script(quick_config(), "(assert false)\n(check-sat)\n");
    INFO(solver::verdict_name(v));
    CHECK(std::holds_alternative<solver::Unsat>(v));
}

TEST_CASE("sat script captures a model") {
    if (!have_solver())
        return;
    auto v = solver::run_script(quick_config(),
                                "(declare-const x Bool)\n(assert x)\n(check-sat)\n");
    REQUIRE(std::holds_alternative<solver::Sat>(v));
    const auto& sat = std::get<solver::Sat>(v);
    CHECK(sat.rawModel.find("define-fun") != std::string::npos);
    CHECK(sat.rawModel.find("x") != std::string::npos);
}

TEST_CASE("model capture can be disabled") {
    if (!have_solver())
        return;
    auto cfg = quick_config();
    cfg.captureModel = false;
    auto v = solver::run_script(cfg, "(declare-const x Bool)\n(assert x)\n(check-sat)\n");
    REQUIRE(std::holds_alternative<solver::Sat>(v));
    CHECK(std::get<solver::Sat>(v).rawModel.empty());
}

TEST_CASE("parse error before any status is a solver error") {
    if (!have_solver())
        return;
    auto v = solver::run_script(quick_config(), "(this is not smt\n(check-sat)\n");
    REQUIRE(std::holds_alternative<solver::SolverError>(v));
    CHECK(std::get<solver::SolverError>(v).detail.find("(error") != std::string::npos);
}

TEST_CASE("noise lines before the status are skipped") {
    if (!have_solver())
        return;
    // An unsupported command produces a warning line, not a verdict.
    auto v = solver::run_script(quick_config(), "(foo bar)\n(check-sat)\n");
    INFO(solver::verdict_name(v));
    CHECK(std::holds_alternative<solver::Sat>(v));
}

TEST_CASE("soft timeout reported by the solver maps to Timeout") {
    if (!have_solver())
        return;
    // Integer factoring; far out of reach in 300ms.
    std::string script = "(set-option :timeout 300)\n"
                         "(declare-const p Int)\n"
                         "(declare-const q Int)\n"
                         "(assert (and (> p 1048576) (> q 1048576)"
                         " (= (* p q) 1152921515344265237)))\n"
                         "(check-sat)\n";
    auto v = solver::run_script(quick_config(), script);
    INFO(solver::verdict_name(v));
    CHECK(std::holds_alternative<solver::Timeout>(v));
}

TEST_CASE("unresponsive solver is killed at the deadline") {
    auto cfg = quick_config(100);
    cfg.executablePath = write_stall_script();
    // Large payload so the pipe fills and writes have to wait.
    std::string script(1 << 20, ';');
    script += "\n(check-sat)\n";
    auto start = std::chrono::steady_clock::now();
    auto v = solver::run_script(cfg, script);
    auto elapsed = std::chrono::steady_clock::now() - start;
    INFO(solver::verdict_name(v));
    CHECK(std::holds_alternative<solver::Timeout>(v));
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 6000);
    std::remove(cfg.executablePath.c_str());
}

TEST_CASE("missing executable is reported, not hung") {
    SolverConfig cfg;
    cfg.executablePath = "/no/such/dir/definitely-not-a-solver";
    cfg.timeoutMs = 2000;
    auto v = solver::run_script(cfg, "(check-sat)\n");
    REQUIRE(std::holds_alternative<solver::SolverError>(v));
    CHECK(std::get<solver::SolverError>(v).detail.find("cannot start") != std::string::npos);
}

TEST_CASE("solver_available") {
    std::string detail;
    CHECK_FALSE(solver::solver_available(
        SolverConfig{"/no/such/dir/definitely-not-a-solver"}, &detail));
    CHECK(detail.find("not an executable file") != std::string::npos);

    detail.clear();
    CHECK_FALSE(solver::solver_available(SolverConfig{"definitely-not-a-solver-xyz"}, &detail));
    CHECK(detail.find("not found in PATH") != std::string::npos);

    if (have_solver())
        CHECK(solver::solver_available(SolverConfig{}));
}

TEST_CASE("verdict names") {
    CHECK(std::string(solver::verdict_name(SolverVerdict{solver::Unsat{}})) == "unsat");
    CHECK(std::string(solver::verdict_name(SolverVerdict{solver::Sat{}})) == "sat");
    CHECK(std::string(solver::verdict_name(SolverVerdict{solver::Unknown{}})) == "unknown");
    CHECK(std::string(solver::verdict_name(SolverVerdict{solver::Timeout{}})) == "timeout");
    CHECK(std::string(solver::verdict_name(SolverVerdict{solver::SolverError{}})) ==
          "solver-error");
}

TEST_CASE("an encoded obligation discharges end to end") {
    if (!have_solver())
        return;
    const char* src = R"(
type guid: string("[A-F\\d]{4,4}")

type user: void {
    .uid: guid
    .name: string
}

operation find_user_by_name(string)(user)
operation find_user_by_id(guid)(user)
operation lookup(string)(user)

main {
    lookup(name) {
        find_user_by_name@SelfOut(name)(user);
        find_user_by_id@SelfOut(user.uid)(other)
    }
}
)";
    auto resolved = lang::resolve(lang::parse_program(src));
    auto encoded = enc::encode(resolved);
    REQUIRE(encoded.obligations.size() == 2);
    const auto* vc = std::get_if<enc::Vc>(&encoded.obligations[1]);
    REQUIRE(vc != nullptr);
    auto v = solver::run_script(quick_config(), vc->script.render());
    INFO(solver::verdict_name(v));
    CHECK(std::holds_alternative<solver::Unsat>(v));
}
