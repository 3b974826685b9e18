#include <catch2/catch_amalgamated.hpp>

#include "tuner/crs.hpp"
#include "tuner/presets.hpp"
#include "tuner/synthetic.hpp"

using namespace tuner;

namespace {

ParameterSpace small_space() {
  return ParameterSpace(
      "custom",
      {{"mem", IntRange{256, 3072, 256}, Value(std::int64_t{1024}), true, std::nullopt, ""},
       {"frac", FloatRange{0.0, 1.0, 0.1}, Value(0.5), false, std::nullopt, ""},
       {"flag", BoolDomain{}, Value(false), false, std::nullopt, ""}});
}

CostModel centered_model(const ParameterSpace& space, std::int64_t base_ms = 100000) {
  CostModel model;
  model.base_ms = base_ms;
  for (const auto& spec : space.params()) model.terms[spec.name] = {1.0, spec.default_value};
  return model;
}

// Succeeds `successes` times, then fails everything.
class FlakyEvaluator final : public Evaluator {
 public:
  explicit FlakyEvaluator(std::size_t successes) : remaining_(successes) {}
  EvalResult evaluate(const Configuration&) override {
    if (remaining_ == 0) return EvalResult::failure("exhausted");
    --remaining_;
    return EvalResult::success(static_cast<std::int64_t>(1000 + remaining_));
  }
  bool parallel_safe() const override { return false; }

 private:
  std::size_t remaining_;
};

bool interval_nested(const ParamBound& inner, const ParamBound& outer, const std::string& name) {
  const auto* in = std::get_if<Interval>(&inner);
  const auto* out = std::get_if<Interval>(&outer);
  if (!in || !out) return true;  // discrete entries have no interval to nest
  return detail::as_real(in->lower, name) >= detail::as_real(out->lower, name) &&
         detail::as_real(in->upper, name) <= detail::as_real(out->upper, name);
}

}  // namespace

TEST_CASE("random_round on collapsed bounds repeats the single point") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  Bounds bounds;
  bounds.entries["mem"] = Interval{Value(std::int64_t{512}), Value(std::int64_t{512})};
  bounds.entries["frac"] = Interval{Value(0.25), Value(0.25)};
  bounds.entries["flag"] = Pinned{Value(true)};

  CrsOptions options;
  options.round_size = 5;
  options.top_k = 3;
  std::mt19937_64 rng(1);
  const auto round = random_round(space, bounds, options, evaluator, rng);
  REQUIRE(round.ok());
  REQUIRE(round.trials.size() == 5);
  for (const auto& trial : round.trials) CHECK(trial.config == round.trials[0].config);
  REQUIRE(round.topk.size() == 3);
  for (const auto& config : round.topk) CHECK(config == round.trials[0].config);
}

TEST_CASE("random_round keeps the k lowest times, cross-checked by sorting") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 50;
  options.top_k = 5;
  std::mt19937_64 rng(42);
  const auto round = random_round(space, Bounds::full(space), options, evaluator, rng);
  REQUIRE(round.ok());

  std::vector<std::int64_t> times;
  for (const auto& trial : round.trials) times.push_back(trial.result.duration_ms);
  std::sort(times.begin(), times.end());

  SyntheticEvaluator check(space, centered_model(space));
  for (std::size_t i = 0; i < round.topk.size(); ++i)
    CHECK(check.evaluate(round.topk[i]).duration_ms == times[i]);
}

TEST_CASE("random_round is reproducible for a fixed seed") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 20;
  options.top_k = 4;

  std::mt19937_64 a(777), b(777);
  const auto first = random_round(space, Bounds::full(space), options, evaluator, a);
  const auto second = random_round(space, Bounds::full(space), options, evaluator, b);
  REQUIRE(first.trials.size() == second.trials.size());
  for (std::size_t i = 0; i < first.trials.size(); ++i) {
    CHECK(first.trials[i].config == second.trials[i].config);
    CHECK(first.trials[i].result.duration_ms == second.trials[i].result.duration_ms);
  }
  CHECK(first.topk == second.topk);
}

TEST_CASE("random_round reports a round error when successes fall below k") {
  const auto space = small_space();
  FlakyEvaluator evaluator(2);
  CrsOptions options;
  options.round_size = 6;
  options.top_k = 4;
  std::mt19937_64 rng(5);
  const auto round = random_round(space, Bounds::full(space), options, evaluator, rng);
  CHECK_FALSE(round.ok());
  CHECK(round.trials.size() == 6);
  CHECK(round.topk.size() == 2);  // the successes it did get
}

TEST_CASE("contract_bounds takes per-parameter extrema") {
  const auto space = small_space();
  const auto prev = Bounds::full(space);
  const auto mk = [](std::int64_t mem, double frac, bool flag) {
    return Configuration{{"mem", Value(mem)}, {"frac", Value(frac)}, {"flag", Value(flag)}};
  };

  const auto bounds =
      contract_bounds({mk(512, 0.5, true), mk(768, 0.25, true), mk(640, 0.75, true)}, space, prev);
  const auto& mem = std::get<Interval>(bounds.entries.at("mem"));
  CHECK(std::get<std::int64_t>(mem.lower) == 512);
  CHECK(std::get<std::int64_t>(mem.upper) == 768);
  const auto& frac = std::get<Interval>(bounds.entries.at("frac"));
  CHECK(std::get<double>(frac.lower) == 0.25);
  CHECK(std::get<double>(frac.upper) == 0.75);
  CHECK(std::get<bool>(std::get<Pinned>(bounds.entries.at("flag")).value) == true);

  const auto disagreeing =
      contract_bounds({mk(512, 0.5, true), mk(512, 0.5, false)}, space, prev);
  CHECK(std::holds_alternative<FreeChoice>(disagreeing.entries.at("flag")));

  const auto single = contract_bounds({mk(640, 0.3, false)}, space, prev);
  const auto& collapsed = std::get<Interval>(single.entries.at("mem"));
  CHECK(std::get<std::int64_t>(collapsed.lower) == 640);
  CHECK(std::get<std::int64_t>(collapsed.upper) == 640);

  for (const auto& [name, entry] : bounds.entries)
    CHECK(interval_nested(entry, prev.entries.at(name), name));
}

TEST_CASE("contract_bounds honors a contractable-parameter filter") {
  const auto space = small_space();
  const auto prev = Bounds::full(space);
  const Configuration sample{{"mem", Value(std::int64_t{512})}, {"frac", Value(0.5)},
                             {"flag", Value(true)}};
  const auto bounds =
      contract_bounds({sample}, space, prev, std::vector<std::string>{"mem"});
  const auto& mem = std::get<Interval>(bounds.entries.at("mem"));
  CHECK(std::get<std::int64_t>(mem.lower) == 512);
  // frac kept the previous full-domain bounds
  const auto& frac = std::get<Interval>(bounds.entries.at("frac"));
  CHECK(std::get<double>(frac.lower) == 0.0);
  CHECK(std::get<double>(frac.upper) == 1.0);
  CHECK(std::holds_alternative<FreeChoice>(bounds.entries.at("flag")));
}

TEST_CASE("variation is the clamped relative improvement") {
  CHECK(variation(1000, 900) == Catch::Approx(0.10));
  CHECK(variation(1000, 1000) == 0.0);
  CHECK(variation(1000, 1100) == 0.0);
  CHECK(variation(339000, 171000) == Catch::Approx(0.4956).margin(0.0001));
  CHECK_THROWS_AS(variation(0, 1), ValidationError);
}

TEST_CASE("threshold 1.0 stops after the first contraction round") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 10;
  options.top_k = 3;
  options.threshold = 1.0;
  options.max_rounds = 10;
  options.seed = 11;
  const auto result = controlled_random_search(space, evaluator, options);
  CHECK(result.phases.size() == 2);
}

TEST_CASE("bounds collapsed onto the optimum are a fixed point") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space, 50000));
  Bounds initial;
  initial.entries["mem"] = Interval{Value(std::int64_t{1024}), Value(std::int64_t{1024})};
  initial.entries["frac"] = Interval{Value(0.5), Value(0.5)};
  initial.entries["flag"] = Pinned{Value(false)};

  CrsOptions options;
  options.round_size = 8;
  options.top_k = 2;
  options.seed = 3;
  const auto result = controlled_random_search(space, evaluator, options, initial);
  CHECK(result.phases.size() == 2);  // round 2 shows variation 0 and stops
  CHECK(result.best_time_ms == 50000);
  CHECK(result.best_config == space.defaults());
}

TEST_CASE("crs keeps a non-increasing incumbent and nested bounds") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 30;
  options.top_k = 5;
  options.threshold = 0.001;
  options.max_rounds = 8;
  options.seed = 2026;

  CrsTrace trace;
  const auto result = controlled_random_search(space, evaluator, options, Bounds::full(space), {},
                                               &trace);
  REQUIRE(result.phases.size() >= 2);
  for (std::size_t i = 1; i < result.phases.size(); ++i)
    CHECK(result.phases[i].incumbent_ms <= result.phases[i - 1].incumbent_ms);

  REQUIRE(trace.round_bounds.size() == result.phases.size());
  for (std::size_t r = 1; r < trace.round_bounds.size(); ++r) {
    for (const auto& [name, entry] : trace.round_bounds[r].entries)
      CHECK(interval_nested(entry, trace.round_bounds[r - 1].entries.at(name), name));
  }

  // every sampled configuration lies within its round's bounds
  std::size_t trial_index = 0;
  for (std::size_t r = 0; r < trace.round_bounds.size(); ++r) {
    for (std::size_t i = 0; i < options.round_size; ++i, ++trial_index) {
      const auto& config = result.trials[trial_index].config;
      for (const auto& [name, entry] : trace.round_bounds[r].entries) {
        if (const auto* interval = std::get_if<Interval>(&entry)) {
          const double v = detail::as_real(config.at(name), name);
          CHECK(v >= detail::as_real(interval->lower, name));
          CHECK(v <= detail::as_real(interval->upper, name));
        } else if (const auto* pinned = std::get_if<Pinned>(&entry)) {
          CHECK(config.at(name) == pinned->value);
        }
      }
    }
  }
}

TEST_CASE("with k = m contraction matches the sample extrema from the log") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 12;
  options.top_k = 12;
  options.seed = 55;
  std::mt19937_64 rng(options.seed);
  const auto round = random_round(space, Bounds::full(space), options, evaluator, rng);
  REQUIRE(round.ok());
  const auto bounds = contract_bounds(round.topk, space, Bounds::full(space));

  double lo = 1e18, hi = -1e18;
  for (const auto& trial : round.trials) {
    const double v = static_cast<double>(std::get<std::int64_t>(trial.config.at("mem")));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto& mem = std::get<Interval>(bounds.entries.at("mem"));
  CHECK(detail::as_real(mem.lower, "mem") == lo);
  CHECK(detail::as_real(mem.upper, "mem") == hi);
}

TEST_CASE("whole crs runs are bit-identical for a fixed seed") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 15;
  options.top_k = 4;
  options.seed = 909;

  const auto a = controlled_random_search(space, evaluator, options);
  const auto b = controlled_random_search(space, evaluator, options);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].config == b.trials[i].config);
    CHECK(a.trials[i].result.duration_ms == b.trials[i].result.duration_ms);
  }
  CHECK(a.best_config == b.best_config);
  CHECK(a.best_time_ms == b.best_time_ms);
}

TEST_CASE("a failed first round is fatal, a failed later round degrades") {
  const auto space = small_space();
  CrsOptions options;
  options.round_size = 6;
  options.top_k = 3;
  options.max_rounds = 5;
  options.threshold = 0.0001;

  FlakyEvaluator dead(0);
  CHECK_THROWS_AS(controlled_random_search(space, dead, options), RunError);

  FlakyEvaluator fades(8);  // round 1 fine, round 2 starves
  const auto result = controlled_random_search(space, fades, options);
  CHECK_FALSE(result.warning.empty());
  CHECK(result.best_time_ms > 0);
  CHECK(result.phases.size() == 1);
}

TEST_CASE("crs options are validated") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions bad;
  bad.top_k = 10;
  bad.round_size = 5;
  CHECK_THROWS_AS(controlled_random_search(space, evaluator, bad), ValidationError);
  bad = CrsOptions{};
  bad.threshold = 0.0;
  CHECK_THROWS_AS(controlled_random_search(space, evaluator, bad), ValidationError);
  bad = CrsOptions{};
  bad.max_rounds = 0;
  CHECK_THROWS_AS(controlled_random_search(space, evaluator, bad), ValidationError);
}

TEST_CASE("parallel and sequential rounds agree on trials and top-k") {
  const auto space = small_space();
  SyntheticEvaluator evaluator(space, centered_model(space));
  CrsOptions options;
  options.round_size = 40;
  options.top_k = 6;

  SearchSettings sequential;
  sequential.max_parallel = 1;
  SearchSettings parallel;
  parallel.max_parallel = 8;

  std::mt19937_64 a(4242), b(4242);
  const auto seq = random_round(space, Bounds::full(space), options, evaluator, a, "crs-round-1", 0,
                                sequential);
  const auto par = random_round(space, Bounds::full(space), options, evaluator, b, "crs-round-1", 0,
                                parallel);
  REQUIRE(seq.ok());
  REQUIRE(par.ok());
  CHECK(seq.topk == par.topk);
  REQUIRE(seq.trials.size() == par.trials.size());
  for (std::size_t i = 0; i < seq.trials.size(); ++i) {
    CHECK(seq.trials[i].config == par.trials[i].config);
    CHECK(seq.trials[i].result.duration_ms == par.trials[i].result.duration_ms);
  }
}

TEST_CASE("the hadoop shortcut bounds pin replication and blocksize") {
  const auto hadoop = preset_hadoop();
  const auto bounds = hadoop_preset_crs_bounds(hadoop);
  const auto& replication = std::get<Interval>(bounds.entries.at("dfs.replication"));
  CHECK(std::get<std::int64_t>(replication.lower) == 1);
  CHECK(std::get<std::int64_t>(replication.upper) == 1);
  const auto& blocksize = std::get<Interval>(bounds.entries.at("dfs.blocksize"));
  CHECK(std::get<std::int64_t>(blocksize.lower) == 192);
  CHECK(std::get<std::int64_t>(blocksize.upper) == 192);

  SyntheticEvaluator evaluator(hadoop, centered_model(hadoop));
  CrsOptions options;
  options.round_size = 10;
  options.top_k = 3;
  options.seed = 8;
  options.max_rounds = 3;
  const auto result = controlled_random_search(hadoop, evaluator, options, bounds);
  for (const auto& trial : result.trials) {
    CHECK(std::get<std::int64_t>(trial.config.at("dfs.replication")) == 1);
    CHECK(std::get<std::int64_t>(trial.config.at("dfs.blocksize")) == 192);
  }
}
