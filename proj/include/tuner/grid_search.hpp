#pragma once

#include <cmath>
#include <limits>

#include "tuner/run_log.hpp"

namespace tuner {

// Per-parameter candidate value lists; the cartesian product is the search
// space of one grid phase.
struct ParamGrid {
  std::map<std::string, std::vector<Value>> candidates;
};

struct GridOptions {
  std::vector<std::string> sweep;         // enumerated parameters
  std::map<std::string, Value> fixed;     // everything else, pinned
  std::vector<std::string> finer_params;  // influential params refined in phase 2
  std::vector<std::string> finer_pin_max; // pinned to their domain max in phase 2
  std::optional<std::uint64_t> max_trials;
};

struct PhaseSummary {
  std::string tag;
  std::size_t trials = 0;
  std::int64_t incumbent_ms = 0;  // best time after this phase
};

struct TunerResult {
  Configuration best_config;
  std::int64_t best_time_ms = 0;
  std::vector<Trial> trials;
  std::vector<PhaseSummary> phases;
  std::string warning;  // non-empty when a run degraded but kept its incumbent
};

struct SearchSettings {
  RunLog* log = nullptr;
  int max_parallel = 1;
  std::string algorithm;  // tag for log records; entry points default it
};

namespace detail {

struct PhaseOutcome {
  std::vector<Trial> trials;
  std::optional<std::size_t> best;  // position within trials
};

// Evaluates one batch and reduces by enumeration index: the incumbent is
// identical whether evaluations ran sequentially or concurrently. Ties keep
// the earlier configuration (strict improvement only).
inline PhaseOutcome run_phase(const ParameterSpace& space,
                              const std::vector<Configuration>& configs, Evaluator& evaluator,
                              const std::string& phase_tag, std::size_t index_offset,
                              const SearchSettings& settings) {
  auto evals = evaluate_all(evaluator, configs, settings.max_parallel);
  PhaseOutcome out;
  out.trials.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    Trial trial{index_offset + i, configs[i], std::move(evals[i].result),
                std::move(evals[i].started_at), phase_tag};
    if (settings.log) settings.log->append(trial_record(space, trial, settings.algorithm));
    if (trial.result.ok() &&
        (!out.best || trial.result.duration_ms < out.trials[*out.best].result.duration_ms)) {
      out.best = i;
    }
    out.trials.push_back(std::move(trial));
  }
  return out;
}

inline void log_phase(const ParameterSpace& space, const SearchSettings& settings,
                      const std::string& event, const PhaseSummary& summary) {
  if (!settings.log) return;
  LogRecord r;
  r.ts = utc_now_iso();
  r.event = event;
  r.algorithm = settings.algorithm;
  r.platform = space.platform_tag();
  r.phase = summary.tag;
  r.note =
      "trials=" + std::to_string(summary.trials) + " incumbent_ms=" + std::to_string(summary.incumbent_ms);
  settings.log->append(r);
}

inline double domain_min(const ParameterSpec& spec) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) return static_cast<double>(r->min);
  if (const auto* r = std::get_if<FloatRange>(&spec.domain)) return r->min;
  throw ValidationError("parameter '" + spec.name + "' has no numeric range");
}

inline double domain_max(const ParameterSpec& spec) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) return static_cast<double>(r->max);
  if (const auto* r = std::get_if<FloatRange>(&spec.domain)) return r->max;
  throw ValidationError("parameter '" + spec.name + "' has no numeric range");
}

inline Value domain_max_value(const ParameterSpec& spec) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) return r->max;
  if (const auto* r = std::get_if<FloatRange>(&spec.domain)) return r->max;
  throw ValidationError("parameter '" + spec.name + "' has no numeric range");
}

template <typename Seq>
inline bool contains_name(const Seq& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace detail

// Swept parameters get their step-sampled candidates, fixed parameters a
// single pinned value.
inline ParamGrid build_grid(const ParameterSpace& space, const GridOptions& options) {
  for (const auto& name : options.sweep) {
    space.at(name);
    if (options.fixed.count(name))
      throw ValidationError("grid options: '" + name + "' is both swept and fixed");
  }
  ParamGrid grid;
  for (const auto& spec : space.params()) {
    if (detail::contains_name(options.sweep, spec.name)) {
      grid.candidates[spec.name] = sample_values(spec);
      continue;
    }
    const auto it = options.fixed.find(spec.name);
    if (it == options.fixed.end())
      throw ValidationError("grid options: parameter '" + spec.name + "' is neither swept nor fixed");
    if (!value_in_domain(spec, it->second))
      throw ValidationError("grid options: fixed value for '" + spec.name + "' is out of domain");
    grid.candidates[spec.name] = {it->second};
  }
  for (const auto& [name, value] : options.fixed) {
    (void)value;
    space.at(name);
  }
  return grid;
}

// Sweep the given names and pin every other parameter at its default
// (overridable through `fixed`).
inline GridOptions grid_options_with_defaults(const ParameterSpace& space,
                                              std::vector<std::string> sweep,
                                              std::map<std::string, Value> fixed = {}) {
  GridOptions options;
  options.sweep = std::move(sweep);
  options.fixed = std::move(fixed);
  for (const auto& name : options.sweep) space.at(name);
  for (const auto& [name, value] : options.fixed) {
    (void)value;
    space.at(name);
  }
  for (const auto& spec : space.params()) {
    if (!detail::contains_name(options.sweep, spec.name) && !options.fixed.count(spec.name))
      options.fixed.emplace(spec.name, spec.default_value);
  }
  return options;
}

// Curated Hadoop sweep: the three heavy hitters enumerated, replication
// pinned at 1 and map-output compression on (their known-good values),
// memory and blocksize refined in the finer phase.
inline GridOptions hadoop_preset_grid_options(const ParameterSpace& space) {
  auto options = grid_options_with_defaults(
      space,
      {"mapreduce.map.memory.mb", "dfs.blocksize", "mapreduce.tasktracker.map.tasks.maximum"},
      {{"dfs.replication", Value(std::int64_t{1})}, {"mapreduce.map.output.compress", Value(true)}});
  options.finer_params = {"mapreduce.map.memory.mb", "dfs.blocksize"};
  return options;
}

// Curated Spark sweep: five swept parameters, FAIR scheduling pinned,
// storageFraction and network.timeout refined, task.cpus held at its max
// during the finer phase (more cores never hurt it).
inline GridOptions spark_preset_grid_options(const ParameterSpace& space) {
  auto options = grid_options_with_defaults(
      space,
      {"spark.task.cpus", "spark.memory.storageFraction", "spark.network.timeout",
       "spark.shuffle.file.buffer", "spark.memory.fraction"},
      {{"spark.scheduler.mode", Value(std::string("FAIR"))}});
  options.finer_params = {"spark.memory.storageFraction", "spark.network.timeout"};
  options.finer_pin_max = {"spark.task.cpus"};
  return options;
}

// Full cartesian product in odometer order: the LAST parameter in space
// order varies fastest. Refuses to materialize more than max_trials
// configurations when the cap is set.
inline std::vector<Configuration> enumerate_grid(const ParamGrid& grid, const ParameterSpace& space,
                                                 std::optional<std::uint64_t> max_trials = {}) {
  const auto& params = space.params();
  std::vector<const std::vector<Value>*> lists;
  lists.reserve(params.size());
  std::uint64_t total = 1;
  for (const auto& spec : params) {
    const auto it = grid.candidates.find(spec.name);
    if (it == grid.candidates.end())
      throw ValidationError("grid: no candidates for parameter '" + spec.name + "'");
    if (it->second.empty())
      throw ValidationError("grid: empty candidate list for parameter '" + spec.name + "'");
    for (const auto& v : it->second) {
      if (!value_in_domain(spec, v))
        throw ValidationError("grid: candidate out of domain for parameter '" + spec.name + "'");
    }
    if (total > std::numeric_limits<std::uint64_t>::max() / it->second.size())
      throw ValidationError("grid: cartesian product size overflows");
    total *= it->second.size();
    lists.push_back(&it->second);
  }
  if (grid.candidates.size() != params.size())
    throw ValidationError("grid: candidates listed for parameters outside the space");
  if (max_trials && total > *max_trials)
    throw ValidationError("grid: cartesian product of " + std::to_string(total) +
                          " configurations exceeds the cap of " + std::to_string(*max_trials));

  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> digits(params.size(), 0);
  for (;;) {
    Configuration config;
    for (std::size_t i = 0; i < params.size(); ++i)
      config.emplace(params[i].name, (*lists[i])[digits[i]]);
    out.push_back(std::move(config));
    std::size_t pos = params.size();
    for (;;) {
      if (pos == 0) return out;
      --pos;
      if (++digits[pos] < lists[pos]->size()) break;
      digits[pos] = 0;
    }
  }
}

// Exhaustive evaluation of a configuration list. Failed or timed-out trials
// are logged but never become the incumbent.
inline TunerResult grid_search(const ParameterSpace& space,
                               const std::vector<Configuration>& configs, Evaluator& evaluator,
                               const SearchSettings& settings = {},
                               const std::string& phase_tag = "grid") {
  if (configs.empty()) throw ValidationError("grid search: no configurations to evaluate");
  SearchSettings s = settings;
  if (s.algorithm.empty()) s.algorithm = "grid";
  auto phase = detail::run_phase(space, configs, evaluator, phase_tag, 0, s);
  if (!phase.best)
    throw NoIncumbentError("grid search: all " + std::to_string(configs.size()) + " trials failed");
  TunerResult result;
  result.best_config = phase.trials[*phase.best].config;
  result.best_time_ms = phase.trials[*phase.best].result.duration_ms;
  result.phases.push_back({phase_tag, phase.trials.size(), result.best_time_ms});
  result.trials = std::move(phase.trials);
  detail::log_phase(space, s, "phase", result.phases.back());
  return result;
}

struct FinerWindow {
  double lower = 0.0;
  double upper = 0.0;
  double increment = 1.0;
};

// The contracted resampling interval around the incumbent best:
//   new_lower = best - old_lower/2, new_upper = best + old_lower/2,
// clamped into the parameter's domain. The increment is the parameter's
// finer_step when declared; otherwise new_lower/2, clamped into
// (0, window width]. Integer domains round the bounds inward.
inline FinerWindow finer_window(double best_value, double old_lower, double old_upper,
                                const ParameterSpec& spec) {
  if (!is_range_domain(spec.domain))
    throw ValidationError("finer window: parameter '" + spec.name + "' has no range domain");
  if (best_value < old_lower || best_value > old_upper)
    throw ValidationError("finer window: best value outside [old_lower, old_upper]");
  const double dmin = detail::domain_min(spec);
  const double dmax = detail::domain_max(spec);
  const bool integral = std::holds_alternative<IntRange>(spec.domain);

  double lo = std::clamp(best_value - old_lower / 2.0, dmin, dmax);
  double hi = std::clamp(best_value + old_lower / 2.0, dmin, dmax);
  if (integral) {
    lo = std::clamp(std::ceil(lo - 1e-9), dmin, dmax);
    hi = std::clamp(std::floor(hi + 1e-9), dmin, dmax);
    if (lo > hi) {  // inward rounding emptied a sub-unit window
      lo = hi = std::clamp(std::round(best_value), dmin, dmax);
    }
  }
  const double width = hi - lo;

  double inc;
  if (spec.finer_step) {
    inc = *spec.finer_step;
  } else if (width > 0.0) {
    inc = lo / 2.0;
    if (inc <= 0.0 || inc > width) inc = width;
  } else {
    inc = 1.0;  // single-point window; the increment is irrelevant
  }
  if (integral) inc = std::max(1.0, std::round(inc));
  return {lo, hi, inc};
}

// Step-samples the window exactly like sample_values samples a domain.
inline std::vector<Value> window_candidates(const ParameterSpec& spec, const FinerWindow& window) {
  std::vector<Value> out;
  if (std::holds_alternative<IntRange>(spec.domain)) {
    for (std::int64_t v :
         detail::progression_int(std::llround(window.lower), std::llround(window.upper),
                                 std::max<std::int64_t>(1, std::llround(window.increment))))
      out.emplace_back(v);
  } else {
    for (double v : detail::progression_real(window.lower, window.upper, window.increment))
      out.emplace_back(v);
  }
  return out;
}

// Phase 1: exhaustive sweep of the sampled grid. Phase 2: resample each
// finer parameter inside its window around the phase-1 best while pinning
// everything else to the incumbent values; the incumbent carries over, so
// phase 2 can only improve or retain it.
inline TunerResult tune_grid_finer(const ParameterSpace& space, Evaluator& evaluator,
                                   const GridOptions& options,
                                   const SearchSettings& settings = {}) {
  SearchSettings s = settings;
  if (s.algorithm.empty()) s.algorithm = "grid";

  for (const auto& name : options.finer_params) {
    const auto& spec = space.at(name);
    if (!spec.influential)
      throw ValidationError("finer tuning: parameter '" + name + "' is not influential");
    if (!is_range_domain(spec.domain))
      throw ValidationError("finer tuning is numeric; parameter '" + name +
                            "' has a boolean or enum domain");
    if (detail::contains_name(options.finer_pin_max, name))
      throw ValidationError("finer tuning: parameter '" + name + "' cannot be refined and pinned");
  }
  for (const auto& name : options.finer_pin_max) detail::domain_max_value(space.at(name));

  const auto grid = build_grid(space, options);
  const auto configs = enumerate_grid(grid, space, options.max_trials);
  auto phase1 = detail::run_phase(space, configs, evaluator, "grid", 0, s);
  if (!phase1.best)
    throw NoIncumbentError("grid phase: all " + std::to_string(configs.size()) + " trials failed");

  Configuration best_config = phase1.trials[*phase1.best].config;
  std::int64_t best_ms = phase1.trials[*phase1.best].result.duration_ms;

  TunerResult result;
  result.phases.push_back({"grid", phase1.trials.size(), best_ms});
  detail::log_phase(space, s, "phase", result.phases.back());
  result.trials = std::move(phase1.trials);

  if (!options.finer_params.empty()) {
    ParamGrid finer;
    for (const auto& spec : space.params()) {
      if (detail::contains_name(options.finer_params, spec.name)) {
        const auto& phase1_candidates = grid.candidates.at(spec.name);
        const double old_lo = detail::as_real(phase1_candidates.front(), spec.name);
        const double old_hi = detail::as_real(phase1_candidates.back(), spec.name);
        const double best_v = detail::as_real(best_config.at(spec.name), spec.name);
        finer.candidates[spec.name] =
            window_candidates(spec, finer_window(best_v, old_lo, old_hi, spec));
      } else if (detail::contains_name(options.finer_pin_max, spec.name)) {
        finer.candidates[spec.name] = {detail::domain_max_value(spec)};
      } else {
        finer.candidates[spec.name] = {best_config.at(spec.name)};
      }
    }
    const auto finer_configs = enumerate_grid(finer, space, options.max_trials);
    auto phase2 =
        detail::run_phase(space, finer_configs, evaluator, "finer", result.trials.size(), s);
    if (phase2.best) {
      const auto& candidate = phase2.trials[*phase2.best];
      if (candidate.result.duration_ms < best_ms) {
        best_ms = candidate.result.duration_ms;
        best_config = candidate.config;
      }
    }
    result.phases.push_back({"finer", phase2.trials.size(), best_ms});
    detail::log_phase(space, s, "phase", result.phases.back());
    result.trials.insert(result.trials.end(), std::make_move_iterator(phase2.trials.begin()),
                         std::make_move_iterator(phase2.trials.end()));
  }

  result.best_config = std::move(best_config);
  result.best_time_ms = best_ms;
  return result;
}

}  // namespace tuner
