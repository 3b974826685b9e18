#pragma once

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "tuner/evaluator.hpp"

namespace tuner {

// How a configuration reaches the platform: text templates holding
// ${parameter.name} placeholders are materialized next to the job, hook
// commands prepare the run (disable safe mode, delete the old output
// directory), and the run command itself is the only thing timed.
struct ConfigTarget {
  std::string template_path;
  std::string output_path;
};

struct PlatformProfile {
  std::vector<ConfigTarget> config_targets;
  std::string arg_template;  // appended to run after substitution; may be empty
  std::vector<std::string> pre_run;
  std::string run;
  std::vector<std::string> post_run;
  std::chrono::milliseconds timeout{0};
};

namespace detail {

// `${name}` substitutes, `$${` escapes a literal `${`, any other `$` is
// plain text. Unterminated placeholders are malformed.
template <typename OnName>
inline std::string scan_placeholders(std::string_view text, OnName&& on_name) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '$') {
      out += text[i++];
      continue;
    }
    if (i + 2 < text.size() && text[i + 1] == '$' && text[i + 2] == '{') {
      out += "${";
      i += 3;
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '{') {
      const auto end = text.find('}', i + 2);
      if (end == std::string_view::npos)
        throw ValidationError("template: unterminated placeholder");
      const std::string name(text.substr(i + 2, end - i - 2));
      if (name.empty()) throw ValidationError("template: empty placeholder name");
      out += on_name(name);
      i = end + 1;
      continue;
    }
    out += text[i++];
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> extract_placeholders(std::string_view text) {
  std::vector<std::string> names;
  detail::scan_placeholders(text, [&](const std::string& name) {
    names.push_back(name);
    return std::string();
  });
  return names;
}

inline std::string substitute_placeholders(std::string_view text,
                                           const std::map<std::string, std::string>& values) {
  return detail::scan_placeholders(text, [&](const std::string& name) {
    const auto it = values.find(name);
    if (it == values.end()) throw ValidationError("template: unresolved placeholder '" + name + "'");
    return it->second;
  });
}

struct CommandOutcome {
  int exit_code = -1;
  bool timed_out = false;
  std::int64_t wall_ms = 0;
};

// Runs `command` through /bin/sh in its own process group; on timeout the
// whole group is killed so stray children of the job do not linger.
inline CommandOutcome run_shell(const std::string& command,
                                std::optional<std::chrono::milliseconds> timeout = std::nullopt) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw RunError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // either side may win the race; both set the same group

  CommandOutcome outcome;
  const timespec poll{0, 1'000'000};  // 1 ms
  for (;;) {
    int status = 0;
    const pid_t reaped = ::waitpid(pid, &status, WNOHANG);
    if (reaped == pid) {
      outcome.wall_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
      if (WIFEXITED(status)) {
        outcome.exit_code = WEXITSTATUS(status);
      } else if (WIFSIGNALED(status)) {
        outcome.exit_code = 128 + WTERMSIG(status);
      }
      return outcome;
    }
    if (reaped < 0 && errno != EINTR)
      throw RunError(std::string("waitpid failed: ") + std::strerror(errno));
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
    if (timeout && elapsed >= *timeout) {
      ::kill(-pid, SIGKILL);
      int status = 0;
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      outcome.wall_ms = elapsed.count();
      outcome.timed_out = true;
      outcome.exit_code = 128 + SIGKILL;
      return outcome;
    }
    ::nanosleep(&poll, nullptr);
  }
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError("cannot open template file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Temp file plus rename; a partially substituted file is never observable
// at the output path.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RunError("cannot write '" + tmp + "'");
    out << contents;
    out.flush();
    if (!out) throw RunError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw RunError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

}  // namespace detail

// One job at a time against a shared system: materialize configs, run the
// hooks, time the job, clean up. Hook failures before the run invalidate
// the measurement, so they abort the trial; post_run is best effort.
class CommandEvaluator final : public Evaluator {
 public:
  CommandEvaluator(ParameterSpace space, PlatformProfile profile)
      : space_(std::move(space)), profile_(std::move(profile)) {
    if (profile_.timeout <= std::chrono::milliseconds::zero())
      throw ValidationError("profile: timeout must be > 0");
    if (profile_.run.empty()) throw ValidationError("profile: run command must not be empty");
    for (const auto& target : profile_.config_targets)
      check_placeholders(detail::read_file(target.template_path), target.template_path);
    check_placeholders(profile_.arg_template, "arg_template");
  }

  EvalResult evaluate(const Configuration& config) override {
    // Configuration errors surface before any command runs.
    std::map<std::string, std::string> rendered;
    std::vector<std::pair<std::string, std::string>> materialized;  // path, contents
    std::string command = profile_.run;
    try {
      const auto violations = validate(space_, config);
      if (!violations.empty()) return EvalResult::failure(to_string(violations.front()));
      rendered = render_config(space_, config);
      for (const auto& target : profile_.config_targets) {
        const auto text = detail::read_file(target.template_path);
        materialized.emplace_back(target.output_path, substitute_placeholders(text, rendered));
      }
      if (!profile_.arg_template.empty())
        command += " " + substitute_placeholders(profile_.arg_template, rendered);
    } catch (const std::exception& e) {
      return EvalResult::failure(e.what());
    }

    try {
      for (const auto& [path, contents] : materialized) detail::write_file_atomic(path, contents);
    } catch (const std::exception& e) {
      return EvalResult::failure(e.what());
    }

    for (const auto& hook : profile_.pre_run) {
      const auto outcome = run_shell(hook);
      if (outcome.exit_code != 0)
        return EvalResult::failure("pre_run failed (exit " + std::to_string(outcome.exit_code) +
                                   "): " + hook);
    }

    const auto outcome = run_shell(command, profile_.timeout);
    EvalResult result;
    if (outcome.timed_out) {
      result = EvalResult::timed_out("run exceeded timeout of " +
                                     std::to_string(profile_.timeout.count()) + " ms");
    } else if (outcome.exit_code != 0) {
      result = EvalResult::failure("run failed (exit " + std::to_string(outcome.exit_code) + ")");
    } else {
      result = EvalResult::success(std::max<std::int64_t>(1, outcome.wall_ms));
    }

    for (const auto& hook : profile_.post_run) {
      const auto post = run_shell(hook);
      if (post.exit_code != 0) {
        if (!result.message.empty()) result.message += "; ";
        result.message += "post_run failed (exit " + std::to_string(post.exit_code) + "): " + hook;
      }
    }
    return result;
  }

  bool parallel_safe() const override { return false; }

 private:
  void check_placeholders(const std::string& text, const std::string& where) const {
    for (const auto& name : extract_placeholders(text)) {
      if (!space_.contains(name))
        throw ValidationError(where + ": placeholder '" + name +
                              "' names no parameter of the active space");
    }
  }

  ParameterSpace space_;
  PlatformProfile profile_;
};

// Profile file: one JSON document; relative paths resolve against the
// profile's own directory.
inline PlatformProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RunError("cannot open profile file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("profile: ") + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&base](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };
  PlatformProfile profile;
  for (const auto& target : j.value("config_targets", nlohmann::json::array())) {
    profile.config_targets.push_back({resolve(target.at("template_path").get<std::string>()),
                                      resolve(target.at("output_path").get<std::string>())});
  }
  profile.arg_template = j.value("arg_template", "");
  profile.pre_run = j.value("pre_run", std::vector<std::string>{});
  profile.run = j.at("run").get<std::string>();
  profile.post_run = j.value("post_run", std::vector<std::string>{});
  profile.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<std::int64_t>());
  return profile;
}

}  // namespace tuner
