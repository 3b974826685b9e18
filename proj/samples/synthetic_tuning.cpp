// Tunes the built-in Spark space against a synthetic cost surface and
// compares what the two algorithms find.

#include <iostream>

#include "tuner/tuner.hpp"

int main() {
  const auto space = tuner::preset_spark();

  // A made-up workload: fastest with many cores, a mid storage fraction
  // and a large shuffle buffer.
  tuner::CostModel model;
  model.base_ms = 30000;
  for (const auto& spec : space.params()) model.terms[spec.name] = {0.2, spec.default_value};
  model.terms["spark.task.cpus"] = {2.0, tuner::Value(std::int64_t{5})};
  model.terms["spark.memory.storageFraction"] = {1.5, tuner::Value(0.62)};
  model.terms["spark.shuffle.file.buffer"] = {1.0, tuner::Value(std::int64_t{256})};
  tuner::SyntheticEvaluator evaluator(space, model);

  const auto baseline = evaluator.evaluate(space.defaults());
  std::cout << "all-defaults baseline: " << baseline.duration_ms << " ms\n\n";

  const auto grid =
      tuner::tune_grid_finer(space, evaluator, tuner::spark_preset_grid_options(space));
  std::cout << "grid search with finer tuning: " << grid.best_time_ms << " ms after "
            << grid.trials.size() << " trials\n";
  for (const auto& [name, text] : tuner::render_config(space, grid.best_config))
    std::cout << "  " << name << " = " << text << "\n";

  tuner::CrsOptions options;
  options.round_size = 60;
  options.top_k = 6;
  options.seed = 7;
  const auto crs = tuner::controlled_random_search(space, evaluator, options);
  std::cout << "\ncontrolled random search: " << crs.best_time_ms << " ms after "
            << crs.trials.size() << " trials in " << crs.phases.size() << " rounds\n";
  for (const auto& [name, text] : tuner::render_config(space, crs.best_config))
    std::cout << "  " << name << " = " << text << "\n";

  std::cout << "\nimprovement vs baseline: grid "
            << tuner::improvement_percent(baseline.duration_ms, grid.best_time_ms) << "%, crs "
            << tuner::improvement_percent(baseline.duration_ms, crs.best_time_ms) << "%\n";
  return 0;
}
