#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "refcheck/check.hpp"
#include "refcheck/validate.hpp"

namespace fs = std::filesystem;
using namespace refcheck;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrKind::IoError, {}, "cannot open `" + path + "`");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::string read_stdin() {
    return std::string(std::istreambuf_iterator<char>(std::cin),
                       std::istreambuf_iterator<char>());
}

// Options refcheck.toml may set next to the source file. Flags win over
// the file, the file wins over built-in defaults.
struct FileConfig {
    std::optional<std::string> solverPath;
    std::optional<int> timeoutMs;
    std::optional<int> jobs;
    std::optional<bool> legacyNames;
    std::optional<std::string> format;
    std::optional<bool> openWorld;
};

[[noreturn]] void config_fail(const std::string& path, int line, const std::string& msg) {
    fail(ErrKind::SyntaxError, {}, path + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

FileConfig load_config(const fs::path& sourcePath) {
    FileConfig cfg;
    fs::path tomlPath = sourcePath.parent_path() / "refcheck.toml";
    std::ifstream in(tomlPath);
    if (!in) return cfg;
    std::string display = tomlPath.string();

    auto as_int = [&](const std::string& v, int line) {
        char* end = nullptr;
        long n = std::strtol(v.c_str(), &end, 10);
        if (v.empty() || *end != '\0') config_fail(display, line, "expected an integer, got `" + v + "`");
        return static_cast<int>(n);
    };
    auto as_bool = [&](const std::string& v, int line) {
        if (v == "true") return true;
        if (v == "false") return false;
        config_fail(display, line, "expected true or false, got `" + v + "`");
    };
    auto as_string = [&](const std::string& v, int line) {
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            return v.substr(1, v.size() - 2);
        config_fail(display, line, "expected a quoted string, got `" + v + "`");
    };

    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            config_fail(display, lineNo, "expected `key = value`");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (auto hash = value.find(" #"); hash != std::string::npos && value[0] != '"')
            value = trim(value.substr(0, hash));

        if (key == "solver-path") cfg.solverPath = as_string(value, lineNo);
        else if (key == "timeout-ms") cfg.timeoutMs = as_int(value, lineNo);
        else if (key == "jobs") cfg.jobs = as_int(value, lineNo);
        else if (key == "legacy-smt-names") cfg.legacyNames = as_bool(value, lineNo);
        else if (key == "format") cfg.format = as_string(value, lineNo);
        else if (key == "open-world") cfg.openWorld = as_bool(value, lineNo);
        else config_fail(display, lineNo, "unknown key `" + key + "`");
    }
    if (cfg.timeoutMs && *cfg.timeoutMs <= 0)
        fail(ErrKind::SyntaxError, {}, display + ": timeout-ms must be positive");
    return cfg;
}

struct Cli {
    std::string file;
    std::string solverPath;
    int timeoutMs = 10000;
    int jobs = 0;
    bool legacyNames = false;
    std::string emitDir;
    std::string format;
    bool openWorld = false;
    std::string typeName;
    std::string jsonFile;
    std::string outDir = "smt";
};

std::string pick_solver(const CLI::Option* flag, const std::string& flagValue,
                        const FileConfig& cfg) {
    if (flag->count()) return flagValue;
    if (const char* env = std::getenv("REFCHECK_SOLVER"); env && *env) return env;
    if (cfg.solverPath) return *cfg.solverPath;
    return "z3";
}

int cmd_check(const Cli& cli, const CLI::App& sub) {
    std::string source = read_file(cli.file);
    auto resolved = lang::resolve(lang::parse_program(source));
    FileConfig fileCfg = load_config(cli.file);

    chk::CheckConfig cfg;
    cfg.solver.executablePath =
        pick_solver(sub.get_option("--solver-path"), cli.solverPath, fileCfg);
    cfg.solver.timeoutMs = sub.get_option("--timeout-ms")->count() ? cli.timeoutMs
                           : fileCfg.timeoutMs                     ? *fileCfg.timeoutMs
                                                                   : cli.timeoutMs;
    cfg.jobs = sub.get_option("--jobs")->count() ? cli.jobs
               : fileCfg.jobs                    ? *fileCfg.jobs
                                                 : cli.jobs;
    cfg.legacyNames = sub.get_option("--legacy-smt-names")->count()
                          ? cli.legacyNames
                          : fileCfg.legacyNames.value_or(cli.legacyNames);
    std::string format = sub.get_option("--format")->count()
                             ? cli.format
                             : fileCfg.format.value_or(cli.format.empty() ? "text" : cli.format);
    if (format != "text" && format != "json")
        fail(ErrKind::SyntaxError, {}, "format must be text or json, got `" + format + "`");

    if (!cli.emitDir.empty()) {
        enc::EncodeOptions encOpts;
        encOpts.legacyNames = cfg.legacyNames;
        encOpts.timeoutMs = cfg.solver.timeoutMs;
        chk::write_smt_files(enc::encode(resolved, encOpts), cli.emitDir);
    }

    chk::Report report = chk::run_check(resolved, cfg, cli.file);
    if (format == "json")
        std::cout << chk::report_to_json(report) << "\n";
    else
        std::cout << chk::report_to_text(report);
    return chk::exit_code(report);
}

int cmd_validate(const Cli& cli, const CLI::App& sub) {
    std::string source = read_file(cli.file);
    auto resolved = lang::resolve(lang::parse_program(source));
    FileConfig fileCfg = load_config(cli.file);

    const lang::TypeDecl* decl = resolved.find_type(cli.typeName);
    if (!decl)
        fail(ErrKind::UnknownTypeName, {},
             "no type named `" + cli.typeName + "` in " + cli.file);

    val::ValidateOptions opts;
    opts.openWorld = sub.get_option("--open-world")->count()
                         ? cli.openWorld
                         : fileCfg.openWorld.value_or(false);
    std::string format = sub.get_option("--format")->count()
                             ? cli.format
                             : fileCfg.format.value_or("json");
    if (format != "text" && format != "json")
        fail(ErrKind::SyntaxError, {}, "format must be text or json, got `" + format + "`");

    std::string payload = cli.jsonFile.empty() ? read_stdin() : read_file(cli.jsonFile);

    std::vector<val::ValidationError> errors;
    try {
        val::ValueTree value = val::parse_json_value(payload);
        errors = val::validate(value, *decl->body, resolved, opts);
    } catch (const CompileError& e) {
        // undecodable input is invalid input, not a usage error
        std::cerr << (cli.jsonFile.empty() ? "<stdin>" : cli.jsonFile) << ": "
                  << e.first().format() << "\n";
        return 1;
    }

    if (format == "json") {
        std::cout << val::errors_to_json(errors) << "\n";
    } else {
        for (const auto& e : errors)
            std::cout << val::path_string(e.path) << ": " << e.message << "\n";
        if (errors.empty()) std::cout << "ok\n";
    }
    return errors.empty() ? 0 : 1;
}

int cmd_emit_smt(const Cli& cli, const CLI::App& sub) {
    std::string source = read_file(cli.file);
    auto resolved = lang::resolve(lang::parse_program(source));
    FileConfig fileCfg = load_config(cli.file);

    enc::EncodeOptions opts;
    opts.legacyNames = sub.get_option("--legacy-smt-names")->count()
                           ? cli.legacyNames
                           : fileCfg.legacyNames.value_or(false);
    opts.timeoutMs = sub.get_option("--timeout-ms")->count() ? cli.timeoutMs
                     : fileCfg.timeoutMs                     ? *fileCfg.timeoutMs
                                                             : cli.timeoutMs;

    auto written = chk::write_smt_files(enc::encode(resolved, opts), cli.outDir);
    for (const auto& name : written) std::cout << cli.outDir << "/" << name << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"refinement type checker for service interfaces"};
    app.require_subcommand(1);
    Cli cli;

    CLI::App* check = app.add_subcommand("check", "prove every call site against its operation signature");
    check->add_option("file", cli.file, "interface source file")->required();
    check->add_option("--solver-path", cli.solverPath, "SMT solver executable (default z3, or $REFCHECK_SOLVER)");
    check->add_option("--timeout-ms", cli.timeoutMs, "per-condition solver timeout")->check(CLI::PositiveNumber);
    check->add_option("--jobs", cli.jobs, "parallel solver processes (0 = auto)")->check(CLI::NonNegativeNumber);
    check->add_flag("--legacy-smt-names", cli.legacyNames, "emit pre-2.6 regex names (str.in.re)");
    check->add_option("--emit-smt", cli.emitDir, "also write the SMT scripts to this directory");
    check->add_option("--format", cli.format, "text or json");

    CLI::App* validate = app.add_subcommand("validate", "validate a JSON value against a declared type");
    validate->add_option("file", cli.file, "interface source file")->required();
    validate->add_option("type", cli.typeName, "declared type name")->required();
    validate->add_option("json", cli.jsonFile, "JSON file (stdin when omitted)");
    validate->add_flag("--open-world", cli.openWorld, "allow fields the type does not declare");
    validate->add_option("--format", cli.format, "text or json");

    CLI::App* emit = app.add_subcommand("emit-smt", "write the verification conditions as .smt2 files");
    emit->add_option("file", cli.file, "interface source file")->required();
    emit->add_option("-o,--out", cli.outDir, "output directory (default smt)");
    emit->add_flag("--legacy-smt-names", cli.legacyNames, "emit pre-2.6 regex names (str.in.re)");
    emit->add_option("--timeout-ms", cli.timeoutMs, "timeout baked into the scripts")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (check->parsed()) return cmd_check(cli, *check);
        if (validate->parsed()) return cmd_validate(cli, *validate);
        return cmd_emit_smt(cli, *emit);
    } catch (const CompileError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << cli.file << ": " << d.format() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "refcheck: " << e.what() << "\n";
        return 3;
    }
}
