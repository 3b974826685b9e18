#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>
#include <thread>
#include <vector>

#include "tuner/param_space.hpp"

namespace tuner {

enum class TrialStatus { ok, error, timeout };

inline const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok:
      return "ok";
    case TrialStatus::timeout:
      return "timeout";
    default:
      return "error";
  }
}

struct EvalResult {
  TrialStatus status = TrialStatus::error;
  std::int64_t duration_ms = 0;  // meaningful iff status == ok
  std::string message;

  static EvalResult success(std::int64_t ms) { return {TrialStatus::ok, ms, ""}; }
  static EvalResult failure(std::string msg) { return {TrialStatus::error, 0, std::move(msg)}; }
  static EvalResult timed_out(std::string msg) { return {TrialStatus::timeout, 0, std::move(msg)}; }

  bool ok() const { return status == TrialStatus::ok; }
};

// The contract between search algorithms and the system under test:
// configuration in, measured duration out. evaluate never mutates the
// configuration; concurrent calls are allowed only when parallel_safe().
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvalResult evaluate(const Configuration& config) = 0;
  virtual bool parallel_safe() const = 0;
};

// One evaluated configuration.
struct Trial {
  std::size_t index = 0;
  Configuration config;
  EvalResult result;
  std::string started_at;  // ISO-8601 UTC, millisecond precision
  std::string phase_tag;
};

namespace detail {

inline std::string utc_now_iso() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms % 1000));
  return buf;
}

// Rendered, sorted key=value form; the lookup key for replay tables and
// the hash input for per-configuration noise streams.
inline std::string canonical_key(const ParameterSpace& space, const Configuration& config) {
  std::string out;
  for (const auto& [name, value] : config) {
    out += name;
    out += '=';
    out += render_value(space.at(name), value);
    out += '\n';
  }
  return out;
}

}  // namespace detail

struct TimedEval {
  EvalResult result;
  std::string started_at;
};

// Evaluates every configuration, at most max_parallel at a time, and
// returns results indexed like the input so concurrent runs reduce to the
// same incumbent as sequential ones. Falls back to sequential execution
// for evaluators that are not parallel safe.
inline std::vector<TimedEval> evaluate_all(Evaluator& evaluator,
                                           const std::vector<Configuration>& configs,
                                           int max_parallel = 1) {
  std::vector<TimedEval> out(configs.size());
  const auto run_one = [&](std::size_t i) {
    out[i].started_at = detail::utc_now_iso();
    try {
      out[i].result = evaluator.evaluate(configs[i]);
    } catch (const std::exception& e) {
      out[i].result = EvalResult::failure(e.what());
    }
  };
  if (max_parallel <= 1 || !evaluator.parallel_safe() || configs.size() <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_parallel), configs.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= configs.size()) return;
        run_one(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace tuner
