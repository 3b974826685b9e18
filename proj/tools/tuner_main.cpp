// Operator entry point: pick an algorithm and a platform space, wire an
// evaluator, run the tuner, and inspect the results it logged.
//
//   tuner tune    --algorithm grid|crs --space hadoop|spark|FILE ...
//   tuner best    --log FILE
//   tuner presets --space hadoop|spark

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tuner/tuner.hpp"

namespace {

struct TuneArgs {
  std::vector<std::string> algorithm;
  std::string space;
  std::string model_file;
  std::string profile_file;
  std::string replay_file;
  std::string log_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool baseline = false;
  int max_parallel = 1;
  // grid
  std::vector<std::string> sweep;
  std::vector<std::string> finer;
  std::vector<std::string> fixes;
  std::uint64_t max_trials = 1000000;
  // crs
  std::size_t round_size = 60;
  std::size_t top_k = 6;
  double threshold = 0.01;
  std::size_t max_rounds = 10;
  std::vector<std::string> pins;
};

tuner::ParameterSpace resolve_space(const std::string& name) {
  if (name == "hadoop" || name == "spark") return tuner::preset_by_name(name);
  std::ifstream probe(name);
  if (!probe) throw tuner::ValidationError("unknown preset or unreadable space file '" + name + "'");
  return tuner::load_space(probe);
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw tuner::ValidationError("expected name=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

std::string default_artifact_path(const std::string& algorithm, const std::string& platform,
                                  const std::string& extension) {
  const char* dir = std::getenv("TUNER_LOG_DIR");
  const std::string base = (dir && *dir) ? dir : ".";
  return base + "/tuner-" + algorithm + "-" + platform + extension;
}

tuner::GridOptions make_grid_options(const tuner::ParameterSpace& space, const TuneArgs& args) {
  std::map<std::string, tuner::Value> fixed;
  for (const auto& fix : args.fixes) {
    const auto [name, text] = split_assignment(fix);
    fixed[name] = tuner::parse_value(space.at(name), text);
  }
  tuner::GridOptions options;
  if (args.sweep.empty() && fixed.empty()) {
    if (space.platform_tag() == "hadoop") {
      options = tuner::hadoop_preset_grid_options(space);
    } else if (space.platform_tag() == "spark") {
      options = tuner::spark_preset_grid_options(space);
    } else {
      std::vector<std::string> all;
      for (const auto& spec : space.params()) all.push_back(spec.name);
      options = tuner::grid_options_with_defaults(space, std::move(all));
    }
  } else {
    options = tuner::grid_options_with_defaults(space, args.sweep, std::move(fixed));
  }
  if (!args.finer.empty()) options.finer_params = args.finer;
  options.max_trials = args.max_trials;
  return options;
}

tuner::Bounds make_crs_bounds(const tuner::ParameterSpace& space, const TuneArgs& args) {
  auto bounds = tuner::Bounds::full(space);
  for (const auto& pin : args.pins) {
    const auto [name, text] = split_assignment(pin);
    const auto& spec = space.at(name);
    const auto value = tuner::parse_value(spec, text);
    if (tuner::is_range_domain(spec.domain)) {
      bounds.entries[name] = tuner::Interval{value, value};
    } else {
      bounds.entries[name] = tuner::Pinned{value};
    }
  }
  return bounds;
}

std::unique_ptr<tuner::Evaluator> make_evaluator(const tuner::ParameterSpace& space,
                                                 const TuneArgs& args) {
  if (!args.model_file.empty()) {
    return std::make_unique<tuner::SyntheticEvaluator>(
        space, tuner::load_cost_model_file(args.model_file, space));
  }
  if (!args.profile_file.empty()) {
    return std::make_unique<tuner::CommandEvaluator>(space,
                                                     tuner::load_profile_file(args.profile_file));
  }
  return std::make_unique<tuner::ReplayEvaluator>(
      tuner::replay_from_log_file(space, args.replay_file));
}

void print_config(std::ostream& out, const std::map<std::string, std::string>& config) {
  for (const auto& [name, value] : config) out << "  " << name << " = " << value << "\n";
}

int cmd_tune(const TuneArgs& args) {
  if (args.algorithm.size() != 1) {
    std::cerr << "error: --algorithm must be given exactly once\n";
    return 1;
  }
  const std::string algorithm = args.algorithm.front();
  const int evaluator_sources = (args.model_file.empty() ? 0 : 1) +
                                (args.profile_file.empty() ? 0 : 1) +
                                (args.replay_file.empty() ? 0 : 1);
  if (evaluator_sources != 1) {
    std::cerr << "error: exactly one of --model, --profile, --replay is required\n";
    return 1;
  }

  const auto space = resolve_space(args.space);
  auto evaluator = make_evaluator(space, args);
  const std::string log_path =
      args.log_path.empty() ? default_artifact_path(algorithm, space.platform_tag(), ".jsonl")
                            : args.log_path;
  const std::string out_path =
      args.out_path.empty() ? default_artifact_path(algorithm, space.platform_tag(), ".json")
                            : args.out_path;
  tuner::RunLog log(log_path);

  {
    tuner::LogRecord start;
    start.ts = tuner::detail::utc_now_iso();
    start.event = "run_start";
    start.algorithm = algorithm;
    start.platform = space.platform_tag();
    start.note = "seed=" + std::to_string(args.seed);
    log.append(start);
  }

  tuner::SearchSettings settings;
  settings.log = &log;
  settings.max_parallel = args.max_parallel;
  settings.algorithm = algorithm;

  std::optional<std::int64_t> baseline_ms;
  std::size_t baseline_trials = 0;
  if (args.baseline) {
    tuner::Trial trial;
    trial.index = 0;
    trial.config = space.defaults();
    trial.started_at = tuner::detail::utc_now_iso();
    trial.phase_tag = "baseline";
    trial.result = evaluator->evaluate(trial.config);
    log.append(tuner::trial_record(space, trial, algorithm));
    baseline_trials = 1;
    if (trial.result.ok()) {
      baseline_ms = trial.result.duration_ms;
    } else {
      std::cerr << "warning: baseline trial failed: " << trial.result.message << "\n";
    }
  }

  tuner::TunerResult result;
  if (algorithm == "grid") {
    result = tuner::tune_grid_finer(space, *evaluator, make_grid_options(space, args), settings);
  } else {
    tuner::CrsOptions options;
    options.round_size = args.round_size;
    options.top_k = args.top_k;
    options.threshold = args.threshold;
    options.max_rounds = args.max_rounds;
    options.seed = args.seed;
    result = tuner::controlled_random_search(space, *evaluator, options,
                                             make_crs_bounds(space, args), settings);
  }

  // The baseline is a real trial; it may stand as the best (ties go to it,
  // it ran first).
  tuner::Configuration best_config = result.best_config;
  std::int64_t best_ms = result.best_time_ms;
  if (baseline_ms && *baseline_ms <= best_ms) {
    best_ms = *baseline_ms;
    best_config = space.defaults();
  }

  {
    tuner::LogRecord end;
    end.ts = tuner::detail::utc_now_iso();
    end.event = "run_end";
    end.algorithm = algorithm;
    end.platform = space.platform_tag();
    end.note = "best_ms=" + std::to_string(best_ms);
    log.append(end);
  }

  const auto rendered_best = tuner::render_config(space, best_config);
  nlohmann::json summary;
  summary["algorithm"] = algorithm;
  summary["platform"] = space.platform_tag();
  summary["seed"] = args.seed;
  summary["trials"] = result.trials.size() + baseline_trials;
  summary["best_time_ms"] = best_ms;
  summary["best_config"] = rendered_best;
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& phase : result.phases) {
    phases.push_back({{"tag", phase.tag}, {"trials", phase.trials}, {"incumbent_ms", phase.incumbent_ms}});
  }
  summary["phases"] = phases;
  if (baseline_ms) {
    summary["baseline_ms"] = *baseline_ms;
    summary["improvement_pct"] = tuner::improvement_percent(*baseline_ms, best_ms);
  }
  if (!result.warning.empty()) summary["warning"] = result.warning;

  std::cout << algorithm << " on " << space.platform_tag() << ": " << result.trials.size() + baseline_trials
            << " trials, best " << best_ms << " ms\n";
  if (baseline_ms) {
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.2f", tuner::improvement_percent(*baseline_ms, best_ms));
    std::cout << "improvement vs baseline: " << pct << "% (" << *baseline_ms << " -> " << best_ms
              << " ms)\n";
  }
  if (!result.warning.empty()) std::cout << "warning: " << result.warning << "\n";
  std::cout << "best configuration:\n";
  print_config(std::cout, rendered_best);
  std::cout << "log: " << log_path << "\n";

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw tuner::RunError("cannot write output file '" + out_path + "'");
  out << summary.dump(2) << "\n";
  std::cout << "summary: " << out_path << "\n";
  return 0;
}

int cmd_best(const std::string& log_path) {
  const auto loaded = tuner::load_log(log_path);
  for (const auto& warning : loaded.warnings) std::cerr << "warning: " << warning << "\n";
  const auto best = tuner::best_of(loaded.records);
  if (!best) {
    std::cerr << "error: log has no successful trials\n";
    return 3;
  }
  std::cout << "best trial: " << best->duration_ms << " ms at " << best->ts << "\n";
  print_config(std::cout, best->config);
  return 0;
}

int cmd_presets(const std::string& name) {
  tuner::dump_space(std::cout, tuner::preset_by_name(name));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"black-box configuration auto-tuning for batch data platforms"};
  app.require_subcommand(1);

  TuneArgs args;
  auto* tune = app.add_subcommand("tune", "run a tuning algorithm against an evaluator");
  tune->add_option("--algorithm", args.algorithm, "grid | crs")
      ->required()
      ->check(CLI::IsMember({"grid", "crs"}));
  tune->add_option("--space", args.space, "hadoop | spark | space file")->required();
  tune->add_option("--model", args.model_file, "synthetic cost model file");
  tune->add_option("--profile", args.profile_file, "platform profile file");
  tune->add_option("--replay", args.replay_file, "replay fixture (run-log file)");
  tune->add_option("--log", args.log_path, "trial log path (default: under $TUNER_LOG_DIR)");
  tune->add_option("--out", args.out_path, "JSON summary path (default: under $TUNER_LOG_DIR)");
  tune->add_option("--seed", args.seed, "random seed (crs draws)");
  tune->add_flag("--baseline", args.baseline, "evaluate the all-defaults configuration first");
  tune->add_option("--max-parallel", args.max_parallel, "concurrent evaluations (parallel-safe evaluators only)")
      ->check(CLI::PositiveNumber);
  tune->add_option("--sweep", args.sweep, "parameters to enumerate (grid)")->delimiter(',');
  tune->add_option("--finer", args.finer, "influential parameters to refine (grid)")->delimiter(',');
  tune->add_option("--fix", args.fixes, "pin a parameter: name=value (grid, repeatable)");
  tune->add_option("--max-trials", args.max_trials, "refuse grids larger than this");
  tune->add_option("--round-size", args.round_size, "random configs per round (crs)");
  tune->add_option("--top-k", args.top_k, "survivors per round (crs)");
  tune->add_option("--threshold", args.threshold, "relative-improvement stop (crs)");
  tune->add_option("--max-rounds", args.max_rounds, "round cap (crs)");
  tune->add_option("--pin", args.pins, "pin a parameter in the initial bounds: name=value (crs, repeatable)");

  std::string best_log;
  auto* best = app.add_subcommand("best", "print the best trial of a log file");
  best->add_option("--log", best_log, "log file to analyze")->required();

  std::string preset_name;
  auto* presets = app.add_subcommand("presets", "dump a built-in parameter space");
  presets->add_option("--space", preset_name, "hadoop | spark")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 1;
  }

  try {
    if (tune->parsed()) return cmd_tune(args);
    if (best->parsed()) return cmd_best(best_log);
    return cmd_presets(preset_name);
  } catch (const tuner::NoIncumbentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tuner::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
