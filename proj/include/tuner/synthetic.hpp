#pragma once

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tuner/evaluator.hpp"
#include "tuner/space_io.hpp"

namespace tuner {

// Desk-scale stand-in for a real cluster: a separable quadratic cost
// surface with a unique, tunable optimum and optional gaussian noise.
struct CostTerm {
  double weight = 0.0;
  Value optimum;
};

struct CostModel {
  std::int64_t base_ms = 1000;
  std::map<std::string, CostTerm> terms;  // exactly one entry per parameter
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline double normalized_distance(const ParameterSpec& spec, const Value& value,
                                  const Value& optimum) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
    if (r->max == r->min) return 0.0;
    const double v = static_cast<double>(std::get<std::int64_t>(value));
    const double opt = as_real(optimum, spec.name);
    return (v - opt) / static_cast<double>(r->max - r->min);
  }
  if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
    if (r->max == r->min) return 0.0;
    const double v = std::get<double>(value);
    const double opt = as_real(optimum, spec.name);
    return (v - opt) / (r->max - r->min);
  }
  return value == optimum ? 0.0 : 1.0;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t hash) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + hash;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double gaussian(std::mt19937_64& rng) {
  // Box-Muller; one branch is enough for a single draw.
  double u1 = 0.0;
  do {
    u1 = uniform_real(rng, 0.0, 1.0);
  } while (u1 <= 0.0);
  const double u2 = uniform_real(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace detail

// duration_ms = round(base_ms * (1 + sum_i w_i * d_i^2) + eps) where d_i is
// the optimum distance normalized by the domain width. Noise is drawn from
// a stream keyed by (model seed, configuration hash), so repeat evaluations
// of one configuration are identical and evaluation order never matters.
class SyntheticEvaluator final : public Evaluator {
 public:
  SyntheticEvaluator(ParameterSpace space, CostModel model)
      : space_(std::move(space)), model_(std::move(model)) {
    if (model_.base_ms <= 0) throw ValidationError("cost model: base_ms must be > 0");
    if (model_.noise_sd < 0) throw ValidationError("cost model: noise_sd must be >= 0");
    for (const auto& spec : space_.params()) {
      const auto it = model_.terms.find(spec.name);
      if (it == model_.terms.end())
        throw ValidationError("cost model: no term for parameter '" + spec.name + "'");
      if (it->second.weight < 0)
        throw ValidationError("cost model: negative weight for '" + spec.name + "'");
      if (!value_in_domain(spec, it->second.optimum))
        throw ValidationError("cost model: optimum out of domain for '" + spec.name + "'");
    }
    for (const auto& [name, term] : model_.terms) {
      (void)term;
      if (!space_.contains(name))
        throw ValidationError("cost model: term for unknown parameter '" + name + "'");
    }
  }

  EvalResult evaluate(const Configuration& config) override {
    const auto violations = validate(space_, config);
    if (!violations.empty()) return EvalResult::failure(to_string(violations.front()));
    double excess = 0.0;
    for (const auto& spec : space_.params()) {
      const auto& term = model_.terms.at(spec.name);
      const double d = detail::normalized_distance(spec, config.at(spec.name), term.optimum);
      excess += term.weight * d * d;
    }
    double cost = static_cast<double>(model_.base_ms) * (1.0 + excess);
    if (model_.noise_sd > 0.0) {
      const auto hash = detail::fnv1a(detail::canonical_key(space_, config));
      std::mt19937_64 rng(detail::mix_seed(model_.seed, hash));
      cost += detail::gaussian(rng) * model_.noise_sd;
    }
    return EvalResult::success(std::max<std::int64_t>(1, std::llround(cost)));
  }

  bool parallel_safe() const override { return true; }

  const CostModel& model() const { return model_; }

 private:
  ParameterSpace space_;
  CostModel model_;
};

// Model file: a single JSON document, optima typed like their parameters.
inline CostModel load_cost_model(std::istream& in, const ParameterSpace& space) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("cost model: ") + e.what());
  }
  CostModel model;
  model.base_ms = j.at("base_ms").get<std::int64_t>();
  model.noise_sd = j.value("noise_sd", 0.0);
  model.seed = j.value("seed", std::uint64_t{0});
  const auto& terms = j.at("terms");
  for (const auto& [name, term] : terms.items()) {
    const auto* spec = space.find(name);
    if (!spec) throw ValidationError("cost model: term for unknown parameter '" + name + "'");
    CostTerm t;
    t.weight = term.at("weight").get<double>();
    const auto& opt = term.at("optimum");
    if (std::holds_alternative<IntRange>(spec->domain)) {
      t.optimum = opt.get<std::int64_t>();
    } else if (std::holds_alternative<FloatRange>(spec->domain)) {
      t.optimum = opt.get<double>();
    } else if (std::holds_alternative<BoolDomain>(spec->domain)) {
      t.optimum = opt.get<bool>();
    } else {
      t.optimum = opt.get<std::string>();
    }
    model.terms.emplace(name, std::move(t));
  }
  return model;
}

inline CostModel load_cost_model_file(const std::string& path, const ParameterSpace& space) {
  std::ifstream in(path);
  if (!in) throw RunError("cannot open cost model file '" + path + "'");
  return load_cost_model(in, space);
}

}  // namespace tuner
