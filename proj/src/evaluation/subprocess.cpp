// Copyright 2026 The Ideatree Authors.
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


#include "ideatree/evaluation/subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "ideatree/generation/checker.hpp"

namespace ideatree {

namespace fs = std::filesystem;
using json = nlohmann::json;

void SubprocessConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kConfigInvalid, "subprocess: " + m); };
  if (data_dir.empty()) fail("data_dir is required");
  if (scratch_dir.empty()) fail("scratch_dir is required");
  if (interpreter.empty()) fail("interpreter is required");
  if (artifact_name.empty() || artifact_name.find('/') != std::string::npos) {
    fail("artifact_name must be a plain file name");
  }
  if (result_name.empty() || result_name.find('/') != std::string::npos) {
    fail("result_name must be a plain file name");
  }
  if (!(full_timeout_minutes > 0.0) || !std::isfinite(full_timeout_minutes)) {
    fail("full_timeout_minutes must be positive");
  }
  if (!(debug_timeout_minutes > 0.0) || !std::isfinite(debug_timeout_minutes)) {
    fail("debug_timeout_minutes must be positive");
  }
}

SubprocessConfig subprocess_config_from_json(const json& j) {
  static const std::set<std::string> kKeys = {
      "data_dir",           "scratch_dir",           "interpreter",        "interpreter_args",
      "artifact_name",      "result_name",           "full_timeout_minutes",
      "debug_timeout_minutes", "submission_columns", "submission_name",    "max_report_bytes"};
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "subprocess: must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.contains(k)) {
      throw Error(ErrorCode::kConfigInvalid, "subprocess: unknown key '" + k + "'");
    }
  }
  SubprocessConfig c;
  try {
    c.data_dir = j.value("data_dir", std::string());
    c.scratch_dir = j.value("scratch_dir", std::string());
    c.interpreter = j.value("interpreter", c.interpreter);
    c.interpreter_args = j.value("interpreter_args", c.interpreter_args);
    c.artifact_name = j.value("artifact_name", c.artifact_name);
    c.result_name = j.value("result_name", c.result_name);
    c.full_timeout_minutes = j.value("full_timeout_minutes", c.full_timeout_minutes);
    c.debug_timeout_minutes = j.value("debug_timeout_minutes", c.debug_timeout_minutes);
    c.submission_columns = j.value("submission_columns", c.submission_columns);
    c.submission_name = j.value("submission_name", c.submission_name);
    c.max_report_bytes = j.value("max_report_bytes", c.max_report_bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("subprocess: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const SubprocessConfig& c) {
  return {{"data_dir", c.data_dir.string()},
          {"scratch_dir", c.scratch_dir.string()},
          {"interpreter", c.interpreter},
          {"interpreter_args", c.interpreter_args},
          {"artifact_name", c.artifact_name},
          {"result_name", c.result_name},
          {"full_timeout_minutes", c.full_timeout_minutes},
          {"debug_timeout_minutes", c.debug_timeout_minutes},
          {"submission_columns", c.submission_columns},
          {"submission_name", c.submission_name},
          {"max_report_bytes", c.max_report_bytes}};
}

std::pair<std::string, std::string> parse_error_tail(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0) {
    const std::size_t nl = text.rfind('\n', end - 1);
    const std::size_t begin = nl == std::string_view::npos ? 0 : nl + 1;
    std::string_view line = text.substr(begin, end - begin);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      const std::size_t colon = line.find(": ");
      if (colon == std::string_view::npos || colon == 0) return {"", ""};
      const std::string_view cls = line.substr(0, colon);
      const bool identifier = std::all_of(cls.begin(), cls.end(), [](char ch) {
        const auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) || c == '_' || c == '.';
      });
      if (!identifier || std::isdigit(static_cast<unsigned char>(cls.front()))) return {"", ""};
      return {std::string(cls), std::string(line.substr(colon + 2))};
    }
    if (nl == std::string_view::npos) break;
    end = nl;
  }
  return {"", ""};
}

std::optional<double> parse_result_text(std::string_view text) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return std::nullopt;
  const std::size_t last = text.find_last_not_of(" \t\r\n");
  const std::string body(text.substr(first, last - first + 1));
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(body.c_str(), &end);
  if (end != body.c_str() + body.size() || errno == ERANGE || !std::isfinite(x)) {
    return std::nullopt;
  }
  return x;
}

namespace {

std::string resolve_program(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    if (::access(name.c_str(), X_OK) != 0) {
      throw Error(ErrorCode::kConfigInvalid, "subprocess: '" + name + "' is not executable");
    }
    return fs::absolute(name).string();
  }
  const char* path = std::getenv("PATH");
  std::stringstream dirs(path ? path : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    const fs::path candidate = fs::path(dir) / name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  throw Error(ErrorCode::kConfigInvalid, "subprocess: interpreter '" + name + "' not on PATH");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tail(const std::string& s, std::size_t n) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

std::vector<char*> c_strings(std::vector<std::string>& v) {
  std::vector<char*> out;
  for (auto& s : v) out.push_back(s.data());
  out.push_back(nullptr);
  return out;
}

}  // namespace

SubprocessEvaluator::SubprocessEvaluator(SubprocessConfig config) : config_(std::move(config)) {
  config_.validate();
  config_.interpreter = resolve_program(config_.interpreter);
  config_.data_dir = fs::absolute(config_.data_dir);
  config_.scratch_dir = fs::absolute(config_.scratch_dir);
}

EvalOutcome SubprocessEvaluator::evaluate(const EvalRequest& request) {
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_minutes = [&] {
    return std::chrono::duration<double, std::ratio<60>>(std::chrono::steady_clock::now() -
                                                         started)
        .count();
  };
  EvalOutcome out;
  auto fail = [&](ErrorCode code, std::string cls, std::string msg, std::string output) {
    out.failure = FailureReport{code, std::move(cls), std::move(msg), std::move(output)};
    out.cost = elapsed_minutes();
    return out;
  };

  const std::uint64_t seq = sequence_.fetch_add(1);
  const fs::path ws = config_.scratch_dir / ("node-" + std::to_string(request.node.value) + "-" +
                                             std::string(to_string(request.mode)) + "-" +
                                             std::to_string(seq));
  const fs::path artifact = ws / config_.artifact_name;
  const fs::path result = ws / config_.result_name;
  const fs::path out_log = ws / "stdout.log";
  const fs::path err_log = ws / "stderr.log";
  std::error_code ec;
  fs::remove_all(ws, ec);
  fs::create_directories(ws, ec);
  if (ec) {
    return fail(ErrorCode::kIoError, "IoError", "cannot create workspace " + ws.string(), "");
  }
  {
    std::ofstream f(artifact, std::ios::binary);
    f << request.code;
    if (!f) return fail(ErrorCode::kIoError, "IoError", "cannot write artifact", "");
  }

  std::vector<std::string> args = {config_.interpreter};
  args.insert(args.end(), config_.interpreter_args.begin(), config_.interpreter_args.end());
  args.push_back(artifact.string());
  char fraction[32];
  std::snprintf(fraction, sizeof fraction, "%.17g", request.subset_fraction);
  std::vector<std::string> env = {"DATA_DIR=" + config_.data_dir.string(),
                                  "RESULT_FILE=" + result.string(),
                                  std::string("SUBSET_FRACTION=") + fraction,
                                  "SCRATCH_DIR=" + ws.string()};
  for (const char* name : {"PATH", "HOME"}) {
    if (const char* v = std::getenv(name)) env.push_back(std::string(name) + "=" + v);
  }
  std::vector<char*> argv = c_strings(args);
  std::vector<char*> envp = c_strings(env);
  const std::string ws_str = ws.string();

  Fd null_in(::open("/dev/null", O_RDONLY | O_CLOEXEC));
  Fd out_fd(::open(out_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  Fd err_fd(::open(err_log.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  if (null_in.get() < 0 || out_fd.get() < 0 || err_fd.get() < 0) {
    return fail(ErrorCode::kIoError, "IoError", "cannot open log files", "");
  }

  const pid_t pid = ::fork();
  if (pid < 0) {
    return fail(ErrorCode::kIoError, "IoError", std::string("fork: ") + std::strerror(errno), "");
  }
  if (pid == 0) {
    // Only async-signal-safe calls between fork and exec.
    ::setpgid(0, 0);
    if (::chdir(ws_str.c_str()) != 0) ::_exit(126);
    ::dup2(null_in.get(), 0);
    ::dup2(out_fd.get(), 1);
    ::dup2(err_fd.get(), 2);
    ::execve(argv[0], argv.data(), envp.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  const double cap = request.mode == EvalMode::kFull ? config_.full_timeout_minutes
                                                     : config_.debug_timeout_minutes;
  const auto deadline =
      started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double, std::ratio<60>>(cap));
  int status = 0;
  bool timed_out = false;
  auto pause = std::chrono::milliseconds(2);
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      timed_out = true;
      ::kill(-pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      break;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(50));
  }
  // Reap anything the artifact left running in its group.
  ::kill(-pid, SIGKILL);

  const std::string stdout_text = read_file(out_log);
  const std::string stderr_text = read_file(err_log);
  const std::string output = tail(stdout_text + stderr_text, config_.max_report_bytes);

  if (timed_out) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "exceeded the wall-clock cap of %g minutes", cap);
    return fail(ErrorCode::kTimeout, "Timeout", msg, output);
  }
  if (WIFSIGNALED(status)) {
    return fail(ErrorCode::kNonzeroExit, "Signal",
                "terminated by signal " + std::to_string(WTERMSIG(status)), output);
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    auto [cls, msg] = parse_error_tail(stderr_text);
    if (cls.empty()) {
      cls = "NonzeroExit";
      msg = "exit status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
    }
    return fail(ErrorCode::kNonzeroExit, cls, msg, output);
  }
  if (!fs::exists(result)) {
    return fail(ErrorCode::kMissingResultFile, "MissingResultFile",
                "no result file " + config_.result_name, output);
  }
  const std::string result_text = read_file(result);
  const auto score = parse_result_text(result_text);
  if (!score) {
    return fail(ErrorCode::kUnparseableResult, "UnparseableResult",
                "result file holds '" + tail(result_text, 80) + "'", output);
  }
  if (!config_.submission_columns.empty()) {
    const fs::path sub = ws / config_.submission_name;
    if (!fs::exists(sub)) {
      return fail(ErrorCode::kEvaluationFailure, "SubmissionSchemaError",
                  "no submission file " + config_.submission_name, output);
    }
    const auto res = check(read_file(sub) + "\n", {schema_check(config_.submission_columns)});
    if (!res.passed) {
      return fail(ErrorCode::kEvaluationFailure, "SubmissionSchemaError", res.reasons.front(),
                  output);
    }
  }
  out.score = score;
  out.cost = elapsed_minutes();
  return out;
}

}  // namespace ideatree
