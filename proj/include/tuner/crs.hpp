#pragma once

#include "tuner/grid_search.hpp"

namespace tuner {

// Sampling region for one round. Range parameters carry an interval inside
// their domain; boolean/enum parameters are either pinned to one value or
// free to be drawn.
struct Interval {
  Value lower;
  Value upper;
};

struct Pinned {
  Value value;
};

struct FreeChoice {};

using ParamBound = std::variant<Interval, Pinned, FreeChoice>;

struct Bounds {
  std::map<std::string, ParamBound> entries;

  static Bounds full(const ParameterSpace& space) {
    Bounds bounds;
    for (const auto& spec : space.params()) {
      if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
        bounds.entries.emplace(spec.name, Interval{Value(r->min), Value(r->max)});
      } else if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
        bounds.entries.emplace(spec.name, Interval{Value(r->min), Value(r->max)});
      } else {
        bounds.entries.emplace(spec.name, FreeChoice{});
      }
    }
    return bounds;
  }
};

struct CrsOptions {
  std::size_t round_size = 60;  // random configurations per round (m)
  std::size_t top_k = 6;        // survivors that define the next bounds (k)
  double threshold = 0.01;      // stop when relative improvement drops below this
  std::size_t max_rounds = 10;  // threshold-only loops can stall on noise
  std::uint64_t seed = 0;
  // When set, only these parameters contract between rounds; the rest keep
  // their previous bounds.
  std::optional<std::vector<std::string>> contract_params;
};

namespace detail {

inline void check_bounds(const ParameterSpace& space, const Bounds& bounds) {
  for (const auto& spec : space.params()) {
    const auto it = bounds.entries.find(spec.name);
    if (it == bounds.entries.end())
      throw ValidationError("bounds: no entry for parameter '" + spec.name + "'");
    if (const auto* interval = std::get_if<Interval>(&it->second)) {
      if (!is_range_domain(spec.domain))
        throw ValidationError("bounds: interval given for non-range parameter '" + spec.name + "'");
      if (!value_in_domain(spec, interval->lower) || !value_in_domain(spec, interval->upper))
        throw ValidationError("bounds: interval outside the domain of '" + spec.name + "'");
      if (as_real(interval->lower, spec.name) > as_real(interval->upper, spec.name))
        throw ValidationError("bounds: lower > upper for '" + spec.name + "'");
    } else if (const auto* pinned = std::get_if<Pinned>(&it->second)) {
      if (!value_in_domain(spec, pinned->value))
        throw ValidationError("bounds: pinned value outside the domain of '" + spec.name + "'");
    } else if (is_range_domain(spec.domain)) {
      throw ValidationError("bounds: range parameter '" + spec.name + "' needs an interval");
    }
  }
  for (const auto& [name, entry] : bounds.entries) {
    (void)entry;
    space.at(name);
  }
}

inline Configuration draw_config(const ParameterSpace& space, const Bounds& bounds,
                                 std::mt19937_64& rng) {
  Configuration config;
  for (const auto& spec : space.params()) {
    const auto& entry = bounds.entries.at(spec.name);
    if (const auto* interval = std::get_if<Interval>(&entry)) {
      config.emplace(spec.name, random_value(spec, interval->lower, interval->upper, rng));
    } else if (const auto* pinned = std::get_if<Pinned>(&entry)) {
      config.emplace(spec.name, pinned->value);
    } else {
      config.emplace(spec.name, random_value(spec, rng));
    }
  }
  return config;
}

}  // namespace detail

struct RoundOutcome {
  std::vector<Trial> trials;
  std::vector<Configuration> topk;       // k lowest-time successes, draw order on ties
  std::optional<std::size_t> best;       // position of the round's best within trials
  std::string error;                     // non-empty when fewer than k trials succeeded

  bool ok() const { return error.empty(); }
};

// One round: draw m configurations inside the bounds, evaluate them all,
// keep the k fastest. All draws happen before any evaluation, so the rng
// stream is identical for sequential and concurrent runs.
inline RoundOutcome random_round(const ParameterSpace& space, const Bounds& bounds,
                                 const CrsOptions& options, Evaluator& evaluator,
                                 std::mt19937_64& rng, const std::string& phase_tag = "crs-round-1",
                                 std::size_t index_offset = 0,
                                 const SearchSettings& settings = {}) {
  detail::check_bounds(space, bounds);
  SearchSettings s = settings;
  if (s.algorithm.empty()) s.algorithm = "crs";
  std::vector<Configuration> configs;
  configs.reserve(options.round_size);
  for (std::size_t i = 0; i < options.round_size; ++i)
    configs.push_back(detail::draw_config(space, bounds, rng));

  auto phase = detail::run_phase(space, configs, evaluator, phase_tag, index_offset, s);

  std::vector<std::size_t> ok_order;
  for (std::size_t i = 0; i < phase.trials.size(); ++i)
    if (phase.trials[i].result.ok()) ok_order.push_back(i);
  std::stable_sort(ok_order.begin(), ok_order.end(), [&](std::size_t a, std::size_t b) {
    return phase.trials[a].result.duration_ms < phase.trials[b].result.duration_ms;
  });

  RoundOutcome out;
  out.trials = std::move(phase.trials);
  out.best = phase.best;
  if (ok_order.size() < options.top_k) {
    out.error = "round produced " + std::to_string(ok_order.size()) + " successful trials, need " +
                std::to_string(options.top_k);
    if (!out.trials.empty() && !ok_order.empty()) {
      for (std::size_t i : ok_order) out.topk.push_back(out.trials[i].config);
    }
    return out;
  }
  for (std::size_t i = 0; i < options.top_k; ++i)
    out.topk.push_back(out.trials[ok_order[i]].config);
  return out;
}

// New bounds are the per-parameter extrema of the surviving configurations;
// boolean/enum parameters pin when every survivor agrees. The result is
// always nested inside the previous bounds because every survivor was drawn
// there.
inline Bounds contract_bounds(const std::vector<Configuration>& topk, const ParameterSpace& space,
                              const Bounds& prev,
                              const std::optional<std::vector<std::string>>& contract_params = {}) {
  if (topk.empty()) throw ValidationError("contract_bounds: empty top-k");
  Bounds next = prev;
  for (const auto& spec : space.params()) {
    if (contract_params && !detail::contains_name(*contract_params, spec.name)) continue;
    if (is_range_domain(spec.domain)) {
      Value lo = topk.front().at(spec.name);
      Value hi = lo;
      for (const auto& config : topk) {
        const auto& v = config.at(spec.name);
        if (detail::as_real(v, spec.name) < detail::as_real(lo, spec.name)) lo = v;
        if (detail::as_real(v, spec.name) > detail::as_real(hi, spec.name)) hi = v;
      }
      next.entries[spec.name] = Interval{lo, hi};
    } else {
      const Value& first = topk.front().at(spec.name);
      const bool agree = std::all_of(topk.begin(), topk.end(), [&](const Configuration& config) {
        return config.at(spec.name) == first;
      });
      next.entries[spec.name] = agree ? ParamBound(Pinned{first}) : ParamBound(FreeChoice{});
    }
  }
  return next;
}

// Relative improvement of the incumbent, floored at zero (the incumbent
// never worsens).
inline double variation(std::int64_t prev_best_ms, std::int64_t new_best_ms) {
  if (prev_best_ms <= 0) throw ValidationError("variation: prev_best_ms must be > 0");
  const double v = static_cast<double>(prev_best_ms - new_best_ms) / static_cast<double>(prev_best_ms);
  return std::max(0.0, v);
}

// Per-round diagnostics for audits and property tests.
struct CrsTrace {
  std::vector<Bounds> round_bounds;                 // bounds each round sampled
  std::vector<std::vector<Configuration>> round_topk;
};

// Rounds of uniform sampling with top-k bound contraction. The global
// incumbent persists across rounds; the loop exits once a round improves it
// by no more than `threshold` (relative) or max_rounds is reached. A failed
// first round is fatal; a failed later round terminates with the incumbent
// and a warning.
inline TunerResult controlled_random_search(const ParameterSpace& space, Evaluator& evaluator,
                                            const CrsOptions& options, const Bounds& initial,
                                            const SearchSettings& settings = {},
                                            CrsTrace* trace = nullptr) {
  if (options.round_size == 0) throw ValidationError("crs: round_size must be >= 1");
  if (options.top_k == 0 || options.top_k > options.round_size)
    throw ValidationError("crs: top_k must be in [1, round_size]");
  if (options.threshold <= 0.0 || options.threshold > 1.0)
    throw ValidationError("crs: threshold must be in (0, 1]");
  if (options.max_rounds == 0) throw ValidationError("crs: max_rounds must be >= 1");

  SearchSettings s = settings;
  if (s.algorithm.empty()) s.algorithm = "crs";

  std::mt19937_64 rng(options.seed);
  Bounds bounds = initial;
  TunerResult result;
  std::optional<std::int64_t> incumbent_ms;
  Configuration incumbent_config;

  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    const std::string tag = "crs-round-" + std::to_string(round);
    if (trace) trace->round_bounds.push_back(bounds);
    auto outcome = random_round(space, bounds, options, evaluator, rng, tag, result.trials.size(), s);
    result.trials.insert(result.trials.end(), std::make_move_iterator(outcome.trials.begin()),
                         std::make_move_iterator(outcome.trials.end()));
    if (!outcome.ok()) {
      if (round == 1) throw RunError("crs round 1 failed: " + outcome.error);
      result.warning = tag + " failed (" + outcome.error + "); keeping the incumbent";
      break;
    }
    if (trace) trace->round_topk.push_back(outcome.topk);

    const auto prev_ms = incumbent_ms;
    const auto& round_best = result.trials[result.trials.size() - options.round_size + *outcome.best];
    if (!incumbent_ms || round_best.result.duration_ms < *incumbent_ms) {
      incumbent_ms = round_best.result.duration_ms;
      incumbent_config = round_best.config;
    }
    result.phases.push_back({tag, options.round_size, *incumbent_ms});
    detail::log_phase(space, s, "round", result.phases.back());

    if (prev_ms && variation(*prev_ms, *incumbent_ms) <= options.threshold) break;
    if (round < options.max_rounds)
      bounds = contract_bounds(outcome.topk, space, bounds, options.contract_params);
  }

  result.best_config = std::move(incumbent_config);
  result.best_time_ms = *incumbent_ms;
  return result;
}

inline TunerResult controlled_random_search(const ParameterSpace& space, Evaluator& evaluator,
                                            const CrsOptions& options,
                                            const SearchSettings& settings = {},
                                            CrsTrace* trace = nullptr) {
  return controlled_random_search(space, evaluator, options, Bounds::full(space), settings, trace);
}

// Shortcut starting bounds for Hadoop: replication and blocksize held at
// the values grid runs keep settling on, everything else free.
inline Bounds hadoop_preset_crs_bounds(const ParameterSpace& space) {
  Bounds bounds = Bounds::full(space);
  bounds.entries["dfs.replication"] = Interval{Value(std::int64_t{1}), Value(std::int64_t{1})};
  bounds.entries["dfs.blocksize"] = Interval{Value(std::int64_t{192}), Value(std::int64_t{192})};
  return bounds;
}

}  // namespace tuner
