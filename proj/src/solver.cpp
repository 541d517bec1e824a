#include "sketchmap/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sketchmap/errors.hpp"
#include "sketchmap/smtlib.hpp"

extern char** environ;

namespace sketchmap {

namespace {

using Clock = std::chrono::steady_clock;

/// Owns a temporary file holding the script; removed on destruction.
class ScriptFile {
 public:
  explicit ScriptFile(const std::string& text) {
    const char* dir = std::getenv("TMPDIR");
    path_ = std::string(dir && *dir ? dir : "/tmp") + "/sketchmap-XXXXXX.smt2";
    std::vector<char> buf(path_.begin(), path_.end());
    buf.push_back('\0');
    int fd = ::mkstemps(buf.data(), 5);
    if (fd < 0) throw SolverError(std::string("cannot create query file: ") + std::strerror(errno));
    path_ = buf.data();
    std::size_t off = 0;
    while (off < text.size()) {
      ssize_t n = ::write(fd, text.data() + off, text.size() - off);
      if (n < 0) {
        ::close(fd);
        throw SolverError(std::string("cannot write query file: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~ScriptFile() { ::unlink(path_.c_str()); }
  ScriptFile(const ScriptFile&) = delete;
  ScriptFile& operator=(const ScriptFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct Running {
  const SolverConfig* config = nullptr;
  pid_t pid = -1;
  int out = -1;
  int err = -1;
  std::string stdout_text;
  std::string stderr_text;
  Clock::time_point deadline;
  bool finished = false;
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

void kill_and_reap(Running& r) {
  if (r.pid > 0) {
    ::kill(-r.pid, SIGKILL);
    ::kill(r.pid, SIGKILL);
    int status = 0;
    while (::waitpid(r.pid, &status, 0) < 0 && errno == EINTR) {
    }
    r.pid = -1;
  }
  close_fd(r.out);
  close_fd(r.err);
  r.finished = true;
}

bool spawn(Running& r, const std::string& script_path) {
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) return false;
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    return false;
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, script_path.c_str(), O_RDONLY, 0);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
  posix_spawn_file_actions_adddup2(&actions, err_pipe[1], 2);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char*> argv;
  for (const auto& a : r.config->command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = -1;
  int rc = argv.size() > 1 ? posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), environ) : EINVAL;
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  if (rc != 0) {
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    r.stderr_text = "cannot start " + r.config->name + ": " + std::strerror(rc);
    return false;
  }
  r.pid = pid;
  r.out = out_pipe[0];
  r.err = err_pipe[0];
  return true;
}

enum class Verdict { Sat, Unsat, Failed };

Verdict judge(const std::string& out, std::map<std::string, BitVec>& model) {
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string word = line.substr(b, e - b + 1);
    if (word == "unsat") return Verdict::Unsat;
    if (word != "sat") return Verdict::Failed;
    auto here = is.tellg();
    auto pos = here < 0 ? std::string::npos : out.find('(', static_cast<std::size_t>(here));
    if (pos == std::string::npos) return Verdict::Sat;
    try {
      model = parse_model(std::string_view(out).substr(pos));
    } catch (const ParseError&) {
      return Verdict::Failed;
    }
    return Verdict::Sat;
  }
  return Verdict::Failed;
}

}  // namespace

SolveResult portfolio_solve(const std::string& script, const std::vector<SolverConfig>& solvers, double budget) {
  if (solvers.empty()) throw SolverError("no solver configured");
  ScriptFile file(script);
  const auto start = Clock::now();
  auto seconds_since_start = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto to_duration = [](double s) {
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(std::max(0.0, s)));
  };
  const auto overall = start + to_duration(budget);

  std::vector<Running> procs(solvers.size());
  std::string failures;
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    procs[i].config = &solvers[i];
    procs[i].deadline = std::min(overall, start + to_duration(solvers[i].timeout));
    if (!spawn(procs[i], file.path())) {
      procs[i].finished = true;
      failures += solvers[i].name + ": " + procs[i].stderr_text + "\n";
    }
  }

  SolveResult result;
  bool timed_out_any = false;
  auto finish_all = [&] {
    for (auto& p : procs) {
      if (!p.finished) kill_and_reap(p);
    }
  };

  for (;;) {
    // Expire solvers past their own deadline.
    auto now = Clock::now();
    for (auto& p : procs) {
      if (!p.finished && now >= p.deadline) {
        kill_and_reap(p);
        timed_out_any = true;
      }
    }
    std::vector<pollfd> fds;
    std::vector<std::pair<std::size_t, bool>> owners;  // (proc index, is stdout)
    Clock::time_point next_deadline = Clock::time_point::max();
    for (std::size_t i = 0; i < procs.size(); ++i) {
      auto& p = procs[i];
      if (p.finished) continue;
      next_deadline = std::min(next_deadline, p.deadline);
      if (p.out >= 0) {
        fds.push_back({p.out, POLLIN, 0});
        owners.push_back({i, true});
      }
      if (p.err >= 0) {
        fds.push_back({p.err, POLLIN, 0});
        owners.push_back({i, false});
      }
    }
    bool any_running = std::any_of(procs.begin(), procs.end(), [](const Running& p) { return !p.finished; });
    if (!any_running) break;

    if (!fds.empty()) {
      auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next_deadline - Clock::now()).count();
      int timeout_ms = static_cast<int>(std::clamp<long long>(wait + 1, 0, 1000));
      int rc = ::poll(fds.data(), fds.size(), timeout_ms);
      if (rc < 0 && errno != EINTR) {
        finish_all();
        throw SolverError(std::string("poll failed: ") + std::strerror(errno));
      }
      for (std::size_t k = 0; rc > 0 && k < fds.size(); ++k) {
        if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        auto& p = procs[owners[k].first];
        int& fd = owners[k].second ? p.out : p.err;
        std::string& sink = owners[k].second ? p.stdout_text : p.stderr_text;
        char buf[8192];
        ssize_t n = ::read(fd, buf, sizeof buf);
        if (n > 0) {
          sink.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
          close_fd(fd);
        }
      }
    }

    // A solver whose streams are both closed has exited (or is about to).
    for (auto& p : procs) {
      if (p.finished || p.out >= 0 || p.err >= 0) continue;
      int status = 0;
      while (::waitpid(p.pid, &status, 0) < 0 && errno == EINTR) {
      }
      p.pid = -1;
      p.finished = true;
      std::map<std::string, BitVec> model;
      Verdict v = judge(p.stdout_text, model);
      if (v == Verdict::Failed) {
        std::string detail = p.stderr_text.empty() ? p.stdout_text : p.stderr_text;
        failures += p.config->name + ": " + detail.substr(0, 2000) + "\n";
        continue;
      }
      result.status = v == Verdict::Sat ? SatStatus::Sat : SatStatus::Unsat;
      result.model = std::move(model);
      result.winner = p.config->name;
      result.seconds = seconds_since_start();
      finish_all();
      return result;
    }
  }

  result.seconds = seconds_since_start();
  if (timed_out_any) {
    result.status = SatStatus::Timeout;
    return result;
  }
  throw AllSolversFailed("every solver failed:\n" + failures);
}

std::vector<SolverConfig> default_portfolio(double timeout) {
  struct Known {
    const char* name;
    std::vector<std::string> command;
  };
  static const std::vector<Known> known = {
      {"bitwuzla", {"bitwuzla", "--lang", "smt2", "--produce-models"}},
      {"cvc5", {"cvc5", "--lang=smt2", "--produce-models", "-"}},
      {"yices", {"yices-smt2"}},
      {"z3", {"z3", "-in", "-smt2"}},
      {"stp", {"stp", "--SMTLIB2"}},
  };
  auto on_path = [](const std::string& exe) {
    const char* path = std::getenv("PATH");
    if (!path) return false;
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      if (dir.empty()) dir = ".";
      std::string full = dir + "/" + exe;
      if (::access(full.c_str(), X_OK) == 0) return true;
    }
    return false;
  };
  std::vector<SolverConfig> out;
  for (const auto& k : known) {
    if (on_path(k.command[0])) out.push_back({k.name, k.command, timeout});
  }
  return out;
}

std::vector<SolverConfig> load_solver_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open solver config " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("solver config " + path + ": " + e.what());
  }
  std::vector<SolverConfig> out;
  try {
    for (const auto& entry : doc.at("solvers")) {
      SolverConfig cfg;
      cfg.name = entry.at("name").get<std::string>();
      cfg.command = entry.at("command").get<std::vector<std::string>>();
      if (entry.contains("timeout")) cfg.timeout = entry.at("timeout").get<double>();
      if (cfg.command.empty()) throw Error("solver " + cfg.name + " has an empty command");
      out.push_back(std::move(cfg));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("solver config " + path + ": " + e.what());
  }
  return out;
}

std::vector<SolverConfig> resolve_solvers(const std::string& spec, double timeout) {
  if (spec.empty()) return default_portfolio(timeout);
  struct stat st{};
  if (::stat(spec.c_str(), &st) == 0 && S_ISREG(st.st_mode)) return load_solver_config(spec);
  auto all = default_portfolio(timeout);
  std::vector<SolverConfig> out;
  std::stringstream ss(spec);
  std::string name;
  while (std::getline(ss, name, ',')) {
    auto it = std::find_if(all.begin(), all.end(), [&](const SolverConfig& c) { return c.name == name; });
    if (it == all.end()) throw Error("solver " + name + " is not available");
    out.push_back(*it);
  }
  return out;
}

}  // namespace sketchmap
