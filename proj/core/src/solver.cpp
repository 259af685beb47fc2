#include "refcheck/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <mutex>

extern char** environ;

namespace refcheck::solver {

namespace {

using Clock = std::chrono::steady_clock;

// Writes to a pipe whose reader died must not kill the process.
void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
  });
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return std::string(s);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(trim(std::string_view(text).substr(start)));
      break;
    }
    lines.push_back(trim(std::string_view(text).substr(start, nl - start)));
    start = nl + 1;
  }
  return lines;
}

std::string tail_of(const std::string& text, std::size_t max) {
  if (text.size() <= max) return text;
  return "..." + text.substr(text.size() - max);
}

// `(:reason-unknown "timeout")` -> `timeout`
std::string extract_reason(const std::string& line) {
  std::string r = line;
  const std::string head = "(:reason-unknown";
  if (r.rfind(head, 0) == 0) r = r.substr(head.size());
  if (!r.empty() && r.back() == ')') r.pop_back();
  r = trim(r);
  if (r.size() >= 2 && r.front() == '"' && r.back() == '"') r = r.substr(1, r.size() - 2);
  return r;
}

bool reason_is_timeout(const std::string& reason) {
  return reason.find("timeout") != std::string::npos ||
         reason.find("canceled") != std::string::npos ||
         reason.find("cancelled") != std::string::npos ||
         reason.find("resource") != std::string::npos ||
         reason.find("memory") != std::string::npos;
}

SolverVerdict parse_output(const std::string& output, bool exitedCleanly) {
  std::vector<std::string> lines = split_lines(output);
  std::size_t statusIdx = lines.size();
  std::string status;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line == "sat" || line == "unsat" || line == "unknown") {
      statusIdx = i;
      status = line;
      break;
    }
    if (line.rfind("(error", 0) == 0) return SolverError{line};
  }
  if (statusIdx == lines.size()) {
    std::string detail = exitedCleanly ? "solver produced no status line"
                                       : "solver exited abnormally without a status line";
    if (!output.empty()) detail += ": " + tail_of(trim(output), 300);
    return SolverError{std::move(detail)};
  }
  if (status == "unsat") return Unsat{};

  std::string reason;
  std::string model;
  for (std::size_t i = statusIdx + 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.rfind("(:reason-unknown", 0) == 0) {
      reason = extract_reason(line);
      continue;
    }
    if (line.rfind("(error", 0) == 0 || line.empty()) continue;  // post-status errors are benign
    if (!model.empty()) model += '\n';
    model += line;
  }
  if (status == "sat") return Sat{std::move(model)};
  if (reason_is_timeout(reason)) return Timeout{};
  return Unknown{std::move(reason)};
}

struct Pipe {
  int fds[2] = {-1, -1};
  bool open() { return pipe(fds) == 0; }
  void close_read() {
    if (fds[0] >= 0) close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) close(fds[1]);
    fds[1] = -1;
  }
  ~Pipe() {
    close_read();
    close_write();
  }
};

constexpr std::size_t kMaxCapturedOutput = 4u << 20;

}  // namespace

const char* verdict_name(const SolverVerdict& v) {
  switch (v.index()) {
    case 0: return "unsat";
    case 1: return "sat";
    case 2: return "unknown";
    case 3: return "timeout";
    default: return "solver-error";
  }
}

SolverVerdict run_script(const SolverConfig& cfg, const std::string& script) {
  ignore_sigpipe_once();

  std::vector<std::string> args = {cfg.executablePath, "-smt2", "-in"};
  args.insert(args.end(), cfg.extraArgs.begin(), cfg.extraArgs.end());
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  Pipe in, out;
  if (!in.open() || !out.open()) return SolverError{std::string("pipe: ") + std::strerror(errno)};

  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, in.fds[0], 0);
  posix_spawn_file_actions_adddup2(&fa, out.fds[1], 1);
  posix_spawn_file_actions_adddup2(&fa, out.fds[1], 2);
  posix_spawn_file_actions_addclose(&fa, in.fds[1]);
  posix_spawn_file_actions_addclose(&fa, out.fds[0]);

  pid_t pid = -1;
  int rc = posix_spawnp(&pid, cfg.executablePath.c_str(), &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0)
    return SolverError{"cannot start `" + cfg.executablePath + "`: " + std::strerror(rc)};
  in.close_read();
  out.close_write();

  std::string doc = script;
  if (cfg.captureModel) doc += "(get-info :reason-unknown)\n(get-model)\n";

  fcntl(in.fds[1], F_SETFL, O_NONBLOCK);
  const auto deadline = Clock::now() + std::chrono::milliseconds(cfg.timeoutMs + 2000);

  std::string output;
  std::size_t written = 0;
  bool timedOut = false;
  char buf[65536];
  while (true) {
    auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) {
      timedOut = true;
      break;
    }
    struct pollfd fds[2];
    fds[0] = {out.fds[0], POLLIN, 0};
    nfds_t nfds = 1;
    if (in.fds[1] >= 0 && written < doc.size()) {
      fds[1] = {in.fds[1], POLLOUT, 0};
      nfds = 2;
    }
    int ready = poll(fds, nfds, static_cast<int>(remaining));
    if (ready == 0) {
      timedOut = true;
      break;
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = write(in.fds[1], doc.data() + written, doc.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        in.close_write();  // reader is gone; keep draining its output
      }
      if (written == doc.size()) in.close_write();
    }
    if (fds[0].revents & (POLLIN | POLLHUP)) {
      ssize_t n = read(out.fds[0], buf, sizeof buf);
      if (n == 0) break;  // solver closed its end
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        break;
      }
      if (output.size() < kMaxCapturedOutput) output.append(buf, static_cast<std::size_t>(n));
    }
  }

  bool exitedCleanly = false;
  if (timedOut) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    return Timeout{};
  }
  int status = 0;
  for (;;) {
    pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid || w < 0) {
      exitedCleanly = w == pid && WIFEXITED(status) && WEXITSTATUS(status) == 0;
      break;
    }
    if (Clock::now() > deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      break;
    }
    usleep(10'000);
  }
  return parse_output(output, exitedCleanly);
}

bool solver_available(const SolverConfig& cfg, std::string* detail) {
  const std::string& p = cfg.executablePath;
  auto runnable = [](const std::string& f) { return access(f.c_str(), X_OK) == 0; };
  if (p.find('/') != std::string::npos) {
    if (runnable(p)) return true;
    if (detail) *detail = "`" + p + "` is not an executable file";
    return false;
  }
  const char* pathEnv = std::getenv("PATH");
  std::string path = pathEnv ? pathEnv : "";
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t colon = path.find(':', start);
    std::string dir =
        colon == std::string::npos ? path.substr(start) : path.substr(start, colon - start);
    if (dir.empty()) dir = ".";
    if (runnable(dir + "/" + p)) return true;
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (detail) *detail = "`" + p + "` was not found in PATH";
  return false;
}

}  // namespace refcheck::solver
