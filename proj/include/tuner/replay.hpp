#pragma once

#include "tuner/run_log.hpp"

namespace tuner {

// Closed-world evaluator backed by recorded (configuration, duration)
// pairs; run-log trial records stand in for the cluster they were
// measured on. Unknown configurations are trial errors.
class ReplayEvaluator final : public Evaluator {
 public:
  explicit ReplayEvaluator(ParameterSpace space) : space_(std::move(space)) {}

  ReplayEvaluator(ParameterSpace space,
                  const std::vector<std::pair<Configuration, std::int64_t>>& records)
      : space_(std::move(space)) {
    for (const auto& [config, ms] : records) add(config, ms);
  }

  // First recording wins; a replayed history answers like the original.
  void add(const Configuration& config, std::int64_t duration_ms) {
    if (duration_ms <= 0) throw ValidationError("replay: duration must be > 0");
    table_.emplace(detail::canonical_key(space_, config), duration_ms);
  }

  std::size_t size() const { return table_.size(); }

  EvalResult evaluate(const Configuration& config) override {
    std::string key;
    try {
      key = detail::canonical_key(space_, config);
    } catch (const ValidationError& e) {
      return EvalResult::failure(e.what());
    }
    const auto it = table_.find(key);
    if (it == table_.end())
      return EvalResult::failure("replay: no recorded duration for this configuration");
    return EvalResult::success(it->second);
  }

  bool parallel_safe() const override { return true; }

 private:
  ParameterSpace space_;
  std::map<std::string, std::int64_t> table_;
};

// Builds a replay table from the ok trials of a loaded log.
inline ReplayEvaluator replay_from_records(const ParameterSpace& space,
                                           const std::vector<LogRecord>& records) {
  ReplayEvaluator evaluator(space);
  for (const auto& r : records) {
    if (r.event != "trial" || r.status != "ok" || !r.duration_ms) continue;
    evaluator.add(parse_config(space, r.config), *r.duration_ms);
  }
  return evaluator;
}

inline ReplayEvaluator replay_from_log_file(const ParameterSpace& space, const std::string& path) {
  return replay_from_records(space, load_log(path).records);
}

}  // namespace tuner
