// Copyright 2026 The Arbiter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arbiter/smt/solver.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace arbiter::smt {

const char* outcome_name(SolverOutcome::Kind k) {
  switch (k) {
    case SolverOutcome::Kind::Sat: return "sat";
    case SolverOutcome::Kind::Unsat: return "unsat";
    case SolverOutcome::Kind::Unknown: return "unknown";
    case SolverOutcome::Kind::Timeout: return "timeout";
  }
  return "?";
}

namespace {

bool executable(const std::string& path) {
  struct stat st;
  return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(path.c_str(), X_OK) == 0;
}

std::string on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return {};
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    std::string full = dir + "/" + name;
    if (executable(full)) return full;
  }
  return {};
}

struct Child {
  pid_t pid = -1;
  int in = -1;   // our end of the child's stdin
  int out = -1;  // our end of the child's stdout+stderr
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

// Spawns `argv`; a CLOEXEC status pipe reports exec failure as errno.
Result<Child, std::string> spawn(const std::vector<std::string>& argv) {
  int in_pipe[2], out_pipe[2], status_pipe[2];
  if (::pipe(in_pipe) != 0) return unexpected(std::string(std::strerror(errno)));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return unexpected(std::string(std::strerror(errno)));
  }
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    return unexpected(std::string(std::strerror(errno)));
  }
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], status_pipe[0], status_pipe[1]}) ::close(fd);
    return unexpected(std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], 0);
    ::dup2(out_pipe[1], 1);
    ::dup2(out_pipe[1], 2);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], status_pipe[0]}) ::close(fd);
    ::execv(args[0], args.data());
    int err = errno;
    ssize_t ignored = ::write(status_pipe[1], &err, sizeof err);
    (void)ignored;
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(status_pipe[1]);
  int err = 0;
  ssize_t n;
  do {
    n = ::read(status_pipe[0], &err, sizeof err);
  } while (n < 0 && errno == EINTR);
  ::close(status_pipe[0]);
  if (n > 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    int st;
    ::waitpid(pid, &st, 0);
    return unexpected("cannot execute " + argv[0] + ": " + std::strerror(err));
  }
  ::fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  return Child{pid, in_pipe[1], out_pipe[0]};
}

// Feeds `input` and collects output until EOF or the deadline. False on timeout.
bool exchange(Child& c, const std::string& input, std::string& output, int timeout_ms) {
  using Clock = std::chrono::steady_clock;
  auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
  size_t written = 0;
  char buf[65536];
  while (c.out >= 0) {
    pollfd fds[2];
    int nfds = 0;
    fds[nfds++] = pollfd{c.out, POLLIN, 0};
    if (c.in >= 0) fds[nfds++] = pollfd{c.in, POLLOUT, 0};
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) return false;
    int r = ::poll(fds, nfds, static_cast<int>(left));
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (r == 0) return false;
    if (c.in >= 0 && nfds > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[1].revents & (POLLERR | POLLHUP)) {
        close_fd(c.in);
      } else {
        ssize_t w = ::write(c.in, input.data() + written, input.size() - written);
        if (w > 0) written += static_cast<size_t>(w);
        if (w < 0 && errno != EAGAIN && errno != EINTR) close_fd(c.in);
        if (written == input.size()) close_fd(c.in);
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      ssize_t n = ::read(c.out, buf, sizeof buf);
      if (n > 0) {
        output.append(buf, static_cast<size_t>(n));
      } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
        close_fd(c.out);
      }
    }
  }
  return true;
}

}  // namespace

std::string find_solver(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("SOLVER_BIN"); env && *env) return env;
  if (std::string p = on_path("cvc5"); !p.empty()) return p;
#ifdef ARBITER_SOLVER_SHIM
  if (executable(ARBITER_SOLVER_SHIM)) return ARBITER_SOLVER_SHIM;
#endif
  return {};
}

SolverConfig default_solver_config(const std::string& explicit_path) {
  SolverConfig c;
  c.executable = find_solver(explicit_path);
  c.args = {"--lang=smt2"};
  return c;
}

Result<SolverOutcome, SolverError> run_solver(const SolverConfig& config, const std::string& script) {
  if (config.executable.empty()) {
    return unexpected(SolverError{SolverError::Kind::SolverUnavailable,
                                  "no solver found (use --solver or SOLVER_BIN, or put cvc5 on PATH)", {}});
  }
  ::signal(SIGPIPE, SIG_IGN);
  std::vector<std::string> argv = {config.executable};
  argv.insert(argv.end(), config.args.begin(), config.args.end());
  auto child = spawn(argv);
  if (!child) return unexpected(SolverError{SolverError::Kind::SolverUnavailable, child.error(), {}});

  std::string output;
  bool finished = exchange(*child, script + "(get-model)\n", output, config.timeout_ms);
  close_fd(child->in);
  close_fd(child->out);
  if (!finished) ::kill(child->pid, SIGKILL);
  int status = 0;
  while (::waitpid(child->pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!finished) return SolverOutcome{SolverOutcome::Kind::Timeout, std::nullopt, {}};

  auto items = parse_sexprs(output);
  if (!items || items->empty()) {
    return unexpected(SolverError{SolverError::Kind::ProtocolError, "unreadable solver output", output});
  }
  const SExpr& first = (*items)[0];
  if (first.is_symbol("unsat")) return SolverOutcome{SolverOutcome::Kind::Unsat, std::nullopt, {}};
  if (first.is_symbol("unknown")) {
    return SolverOutcome{SolverOutcome::Kind::Unknown, std::nullopt,
                         items->size() > 1 ? (*items)[1].to_string() : std::string("no reason given")};
  }
  if (!first.is_symbol("sat")) {
    return unexpected(SolverError{SolverError::Kind::ProtocolError, "solver said " + first.to_string(), output});
  }
  if (items->size() < 2) {
    return unexpected(SolverError{SolverError::Kind::ModelParseError, "sat without a model", output});
  }
  auto model = Model::parse((*items)[1].to_string());
  if (!model) return unexpected(SolverError{SolverError::Kind::ModelParseError, model.error().message, output});
  return SolverOutcome{SolverOutcome::Kind::Sat, std::move(*model), {}};
}

}  // namespace arbiter::smt
