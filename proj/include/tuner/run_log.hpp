#pragma once

#include <fstream>
#include <mutex>
#include <optional>

#include <json.hpp>

#include "tuner/evaluator.hpp"

namespace tuner {

// Append-only audit trail: one JSON object per line, keys in lexicographic
// order, LF terminators, flushed per record. A log is a complete record of
// a tuning run; best_of over it reproduces the run's reported best.
struct LogRecord {
  std::string ts;      // ISO-8601 UTC, millisecond precision
  std::string event;   // trial | phase | round | run_start | run_end
  std::string algorithm;
  std::string platform;
  std::string phase;
  std::map<std::string, std::string> config;  // rendered values, trial events only
  std::optional<std::int64_t> duration_ms;    // ok trials only
  std::string status;                         // ok | error | timeout, trial events only
  std::string note;

  bool operator==(const LogRecord&) const = default;
};

inline nlohmann::json to_json(const LogRecord& r) {
  nlohmann::json j;
  j["ts"] = r.ts;
  j["event"] = r.event;
  if (!r.algorithm.empty()) j["algorithm"] = r.algorithm;
  if (!r.platform.empty()) j["platform"] = r.platform;
  if (!r.phase.empty()) j["phase"] = r.phase;
  if (r.event == "trial") {
    j["config"] = r.config;
    j["status"] = r.status;
  }
  if (r.duration_ms) j["duration_ms"] = *r.duration_ms;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline LogRecord record_from_json(const nlohmann::json& j) {
  LogRecord r;
  r.ts = j.at("ts").get<std::string>();
  r.event = j.at("event").get<std::string>();
  r.algorithm = j.value("algorithm", "");
  r.platform = j.value("platform", "");
  r.phase = j.value("phase", "");
  if (j.contains("config")) r.config = j.at("config").get<std::map<std::string, std::string>>();
  if (j.contains("duration_ms")) r.duration_ms = j.at("duration_ms").get<std::int64_t>();
  r.status = j.value("status", "");
  r.note = j.value("note", "");
  return r;
}

inline LogRecord trial_record(const ParameterSpace& space, const Trial& trial,
                              const std::string& algorithm) {
  LogRecord r;
  r.ts = trial.started_at;
  r.event = "trial";
  r.algorithm = algorithm;
  r.platform = space.platform_tag();
  r.phase = trial.phase_tag;
  r.config = render_config(space, trial.config);
  r.status = to_string(trial.result.status);
  if (trial.result.ok()) r.duration_ms = trial.result.duration_ms;
  if (!trial.result.message.empty()) r.note = trial.result.message;
  return r;
}

// Single-writer sink. Search modules funnel all records through one RunLog
// even when evaluations run concurrently; a failed write aborts the run
// rather than silently losing audit lines.
class RunLog {
 public:
  explicit RunLog(const std::string& path, bool append = true)
      : path_(path), out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw RunError("cannot open log file '" + path + "'");
  }

  void append(const LogRecord& record) {
    std::lock_guard<std::mutex> lock(mutex_);
    out_ << to_json(record).dump() << '\n';
    out_.flush();
    if (!out_) throw RunError("write to log file '" + path_ + "' failed");
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::mutex mutex_;
};

struct LoadedLog {
  std::vector<LogRecord> records;
  std::vector<std::string> warnings;  // malformed lines, reported and skipped
};

inline LoadedLog load_log(std::istream& in) {
  LoadedLog out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      out.warnings.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline LoadedLog load_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RunError("cannot open log file '" + path + "'");
  return load_log(in);
}

struct BestTrial {
  std::map<std::string, std::string> config;
  std::int64_t duration_ms = 0;
  std::string ts;
};

// Minimum duration over ok trials; ties go to the earliest timestamp, then
// to the earliest line.
inline std::optional<BestTrial> best_of(const std::vector<LogRecord>& records) {
  std::optional<BestTrial> best;
  for (const auto& r : records) {
    if (r.event != "trial" || r.status != "ok" || !r.duration_ms) continue;
    const bool better = !best || *r.duration_ms < best->duration_ms ||
                        (*r.duration_ms == best->duration_ms && r.ts < best->ts);
    if (better) best = BestTrial{r.config, *r.duration_ms, r.ts};
  }
  return best;
}

// Reduction of a tuned run versus its all-defaults baseline, in percent.
inline double improvement_percent(std::int64_t baseline_ms, std::int64_t best_ms) {
  return 100.0 * static_cast<double>(baseline_ms - best_ms) / static_cast<double>(baseline_ms);
}

}  // namespace tuner
