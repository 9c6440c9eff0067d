#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "specweave/error.hpp"
#include "specweave/verifier.hpp"

namespace specweave {

namespace fs = std::filesystem;

std::string
find_executable(const std::string& name)
{
  if (name.find('/') != std::string::npos)
  {
    return ::access(name.c_str(), X_OK) == 0 ? name : std::string();
  }
  const char* path = std::getenv("PATH");
  if (path == nullptr) return {};
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':'))
  {
    if (dir.empty()) continue;
    std::string candidate = dir + "/" + name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate;
  }
  return {};
}

ProcessResult
run_process(const std::vector<std::string>& argv, std::chrono::duration<double> timeout)
{
  int fds[2];
  if (::pipe(fds) != 0)
  {
    throw Error(ErrorKind::BackendUnavailable, std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = ::fork();
  if (pid < 0)
  {
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(ErrorKind::BackendUnavailable, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0)
  {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    std::vector<char*> args;
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  ::fcntl(fds[0], F_SETFL, ::fcntl(fds[0], F_GETFL) | O_NONBLOCK);

  ProcessResult result;
  auto deadline = std::chrono::steady_clock::now()
                  + std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
  char buf[4096];
  bool open = true;
  while (open)
  {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0)
    {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 200)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    while (true)
    {
      ssize_t n = ::read(fds[0], buf, sizeof buf);
      if (n > 0)
      {
        result.output.append(buf, static_cast<std::size_t>(n));
        continue;
      }
      if (n == 0) open = false;
      break;
    }
  }
  ::close(fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (!result.timed_out)
  {
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }
  return result;
}

FramaCBackend::FramaCBackend(FramaCOptions options) : d_options(std::move(options))
{
  if (d_options.scratch_dir.empty())
  {
    d_options.scratch_dir = fs::temp_directory_path().string();
  }
}

std::vector<std::string>
FramaCBackend::command(const VerificationRequest& request, const std::string& file) const
{
  std::vector<std::string> argv = {d_options.executable, "-kernel-warn-key", "annot-error=abort"};
  if (request.mode != CheckMode::Legality)
  {
    argv.insert(argv.end(), {"-wp", "-wp-prover", d_options.prover, "-wp-timeout",
                             std::to_string(d_options.wp_timeout)});
  }
  argv.push_back(file);
  if (request.mode != CheckMode::Legality)
  {
    argv.insert(argv.end(), {"-then", "-report"});
  }
  return argv;
}

Verdict
FramaCBackend::check(const VerificationRequest& request)
{
  if (find_executable(d_options.executable).empty())
  {
    throw Error(ErrorKind::BackendUnavailable, "'" + d_options.executable + "' not found");
  }
  static std::atomic<unsigned> counter{0};
  fs::create_directories(d_options.scratch_dir);
  fs::path file = fs::path(d_options.scratch_dir)
                  / ("specweave-" + std::to_string(::getpid()) + "-"
                     + std::to_string(counter.fetch_add(1)) + ".c");
  {
    std::ofstream out(file, std::ios::binary);
    if (!out)
    {
      throw Error(ErrorKind::IoError, "cannot write '" + file.string() + "'");
    }
    out << request.program_text;
  }
  ProcessResult run = run_process(command(request, file.string()), request.timeout);
  if (!d_options.keep_files)
  {
    std::error_code ec;
    fs::remove(file, ec);
  }
  if (run.timed_out)
  {
    Verdict v;
    v.overall = Outcome::Failed;
    v.timed_out = true;
    v.diagnostics = "timeout after " + std::to_string(request.timeout.count()) + "s";
    return v;
  }
  return parse_wp_report(run.output, run.exit_code, request);
}

namespace {

GoalRef
attribute(const VerificationRequest& request, std::size_t line)
{
  for (const ClauseLine& c : request.clauses)
  {
    if (c.line == line) return GoalRef{c.seq, false, c.clause.text()};
  }
  if (request.target_assertion && request.target_assertion->line == line)
  {
    return GoalRef{std::nullopt, true, "assertion"};
  }
  return GoalRef{std::nullopt, false, "unknown"};
}

bool
proved_status(const std::string& status)
{
  return status.rfind("Valid", 0) == 0 || status == "Considered valid" || status == "Dead"
         || status == "Unreachable" || status == "Surely Valid";
}

}  // namespace

Verdict
parse_wp_report(const std::string& output, int exit_code, const VerificationRequest& request)
{
  Verdict v;
  v.diagnostics = output;
  std::istringstream lines(output);
  std::string line;

  if (exit_code != 0)
  {
    static const std::regex located(R"(([^\s:]+\.[ci]):(\d+)[:\.])");
    v.overall = Outcome::CompileError;
    while (std::getline(lines, line))
    {
      std::smatch m;
      if (!std::regex_search(line, m, located)) continue;
      std::size_t at = std::stoul(m[2].str());
      GoalRef ref = attribute(request, at);
      if (ref.seq)
      {
        v.goals.push_back(Goal{ref, GoalStatus::Unproved, at});
        return v;
      }
      if (!v.error_line) v.error_line = at;
    }
    if (!v.error_line) v.error_line = 0;
    return v;
  }
  if (request.mode == CheckMode::Legality)
  {
    v.overall = Outcome::Proved;
    return v;
  }

  static const std::regex property(
      R"(^\[\s*([^\]]*?)\s*\]\s+(.+?)\s+\(file\s+([^,]+),\s+line\s+(\d+)\))");
  while (std::getline(lines, line))
  {
    std::smatch m;
    if (!std::regex_search(line, m, property)) continue;
    std::size_t at = std::stoul(m[4].str());
    bool ok = proved_status(m[1].str());
    GoalRef ref = attribute(request, at);
    if (!ref.seq && !ref.target) ++v.mapping_errors;
    v.goals.push_back(Goal{ref, ok ? GoalStatus::Proved : GoalStatus::Unproved, at});
  }
  std::stable_sort(v.goals.begin(), v.goals.end(),
                   [](const Goal& a, const Goal& b) { return a.line < b.line; });

  bool focus_ok = true;
  bool all_ok = true;
  for (const Goal& g : v.goals)
  {
    bool ok = g.status == GoalStatus::Proved;
    all_ok = all_ok && ok;
    if (g.ref.seq && (request.focus.empty() || request.focus.count(*g.ref.seq)))
    {
      focus_ok = focus_ok && ok;
    }
  }
  if (request.mode == CheckMode::Satisfiability)
  {
    v.overall = focus_ok ? Outcome::Proved : Outcome::Failed;
  }
  else
  {
    const Goal* target = v.target_goal();
    v.overall = all_ok && target != nullptr ? Outcome::Proved : Outcome::Failed;
  }
  return v;
}

}  // namespace specweave
