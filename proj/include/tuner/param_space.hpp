#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tuner/errors.hpp"

namespace tuner {

// One assigned value: integer, real, boolean, or enum label. The variant
// alternative is fixed by the parameter's domain, never mixed.
using Value = std::variant<std::int64_t, double, bool, std::string>;

struct IntRange {
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::int64_t step = 1;  // grid sampling stride
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct FloatRange {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
  friend bool operator==(const FloatRange&, const FloatRange&) = default;
};

struct BoolDomain {
  friend bool operator==(const BoolDomain&, const BoolDomain&) = default;
};

struct EnumDomain {
  std::vector<std::string> values;
  friend bool operator==(const EnumDomain&, const EnumDomain&) = default;
};

using Domain = std::variant<IntRange, FloatRange, BoolDomain, EnumDomain>;

inline bool is_range_domain(const Domain& d) {
  return std::holds_alternative<IntRange>(d) || std::holds_alternative<FloatRange>(d);
}

struct ParameterSpec {
  std::string name;
  Domain domain;
  Value default_value;
  bool influential = false;
  // Overrides the computed increment during finer tuning.
  std::optional<double> finer_step;
  // Appended on render, e.g. "32" + "k" -> "32k".
  std::string unit_suffix;
};

// A full assignment: exactly one value per parameter of the active space.
using Configuration = std::map<std::string, Value>;

namespace detail {

inline std::int64_t as_int(const Value& v, const std::string& name) {
  if (const auto* p = std::get_if<std::int64_t>(&v)) return *p;
  throw ValidationError("parameter '" + name + "': expected an integer value");
}

inline double as_real(const Value& v, const std::string& name) {
  if (const auto* p = std::get_if<double>(&v)) return *p;
  if (const auto* p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  throw ValidationError("parameter '" + name + "': expected a numeric value");
}

// Lower end of an arithmetic progression is always lo; max is appended as
// the final element when the stride does not land on it exactly.
inline std::vector<std::int64_t> progression_int(std::int64_t lo, std::int64_t hi,
                                                 std::int64_t step) {
  std::vector<std::int64_t> out;
  for (std::int64_t v = lo;;) {
    out.push_back(v);
    if (v > hi - step) break;
    v += step;
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

inline std::vector<double> progression_real(double lo, double hi, double step) {
  std::vector<double> out;
  const double tol = step * 1e-9;
  for (std::size_t i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + tol) break;
    out.push_back(std::min(v, hi));
  }
  if (out.empty() || out.back() < hi - tol) {
    out.push_back(hi);
  } else {
    out.back() = hi;  // snap float dust onto the exact endpoint
  }
  return out;
}

// Bounded draws are hand-rolled so a given seed replays identically
// regardless of the standard library's distribution internals.
inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t span) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % span;
}

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());  // full 64-bit span
  return lo + static_cast<std::int64_t>(next_below(rng, span));
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + unit * (hi - lo);
}

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void check_spec(const ParameterSpec& spec) {
  if (spec.name.empty()) throw ValidationError("parameter name must not be empty");
  const std::string& n = spec.name;
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
    if (r->min > r->max) throw ValidationError("parameter '" + n + "': min > max");
    if (r->step <= 0) throw ValidationError("parameter '" + n + "': step must be > 0");
    const auto d = as_int(spec.default_value, n);
    if (d < r->min || d > r->max)
      throw ValidationError("parameter '" + n + "': default outside [min, max]");
    if (spec.finer_step &&
        (*spec.finer_step <= 0 || *spec.finer_step > static_cast<double>(r->max - r->min)))
      throw ValidationError("parameter '" + n + "': finer_step outside (0, max - min]");
  } else if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
    if (r->min > r->max) throw ValidationError("parameter '" + n + "': min > max");
    if (r->step <= 0) throw ValidationError("parameter '" + n + "': step must be > 0");
    const auto d = as_real(spec.default_value, n);
    if (d < r->min || d > r->max)
      throw ValidationError("parameter '" + n + "': default outside [min, max]");
    if (spec.finer_step && (*spec.finer_step <= 0 || *spec.finer_step > r->max - r->min))
      throw ValidationError("parameter '" + n + "': finer_step outside (0, max - min]");
  } else if (std::holds_alternative<BoolDomain>(spec.domain)) {
    if (!std::holds_alternative<bool>(spec.default_value))
      throw ValidationError("parameter '" + n + "': default must be boolean");
  } else {
    const auto& e = std::get<EnumDomain>(spec.domain);
    if (e.values.empty()) throw ValidationError("parameter '" + n + "': enum needs values");
    for (std::size_t i = 0; i < e.values.size(); ++i)
      for (std::size_t j = i + 1; j < e.values.size(); ++j)
        if (e.values[i] == e.values[j])
          throw ValidationError("parameter '" + n + "': duplicate enum value '" + e.values[i] + "'");
    const auto* d = std::get_if<std::string>(&spec.default_value);
    if (!d || std::find(e.values.begin(), e.values.end(), *d) == e.values.end())
      throw ValidationError("parameter '" + n + "': default must be one of the enum values");
    if (spec.finer_step)
      throw ValidationError("parameter '" + n + "': finer_step only applies to range domains");
  }
}

}  // namespace detail

// Ordered parameter list; the order defines cartesian-product enumeration
// order and is stable after construction.
class ParameterSpace {
 public:
  ParameterSpace(std::string platform_tag, std::vector<ParameterSpec> params)
      : platform_tag_(std::move(platform_tag)), params_(std::move(params)) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      detail::check_spec(params_[i]);
      if (!index_.emplace(params_[i].name, i).second)
        throw ValidationError("duplicate parameter name '" + params_[i].name + "'");
    }
  }

  const std::string& platform_tag() const noexcept { return platform_tag_; }
  const std::vector<ParameterSpec>& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const ParameterSpec* find(const std::string& name) const {
    const auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[it->second];
  }

  const ParameterSpec& at(const std::string& name) const {
    if (const auto* spec = find(name)) return *spec;
    throw ValidationError("unknown parameter '" + name + "'");
  }

  Configuration defaults() const {
    Configuration config;
    for (const auto& spec : params_) config.emplace(spec.name, spec.default_value);
    return config;
  }

 private:
  std::string platform_tag_;
  std::vector<ParameterSpec> params_;
  std::map<std::string, std::size_t> index_;
};

inline bool value_in_domain(const ParameterSpec& spec, const Value& value) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
    const auto* v = std::get_if<std::int64_t>(&value);
    return v && *v >= r->min && *v <= r->max;
  }
  if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
    const auto* v = std::get_if<double>(&value);
    return v && *v >= r->min && *v <= r->max;
  }
  if (std::holds_alternative<BoolDomain>(spec.domain)) {
    return std::holds_alternative<bool>(value);
  }
  const auto& e = std::get<EnumDomain>(spec.domain);
  const auto* v = std::get_if<std::string>(&value);
  return v && std::find(e.values.begin(), e.values.end(), *v) != e.values.end();
}

// Grid candidates for one parameter: {min, min+step, ...} capped at max,
// with max appended when the stride misses it. Booleans enumerate both
// values, enums their declared order.
inline std::vector<Value> sample_values(const ParameterSpec& spec) {
  std::vector<Value> out;
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
    for (std::int64_t v : detail::progression_int(r->min, r->max, r->step)) out.emplace_back(v);
  } else if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
    for (double v : detail::progression_real(r->min, r->max, r->step)) out.emplace_back(v);
  } else if (std::holds_alternative<BoolDomain>(spec.domain)) {
    out.emplace_back(false);
    out.emplace_back(true);
  } else {
    for (const auto& v : std::get<EnumDomain>(spec.domain).values) out.emplace_back(v);
  }
  return out;
}

// Uniform draw within [lo, hi] for range domains; lo/hi are ignored for
// booleans (fair coin) and enums (uniform over the declared values).
inline Value random_value(const ParameterSpec& spec, const Value& lo, const Value& hi,
                          std::mt19937_64& rng) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
    const auto a = detail::as_int(lo, spec.name);
    const auto b = detail::as_int(hi, spec.name);
    if (a > b) throw ValidationError("parameter '" + spec.name + "': lo > hi");
    if (a < r->min || b > r->max)
      throw ValidationError("parameter '" + spec.name + "': bounds outside the domain");
    return detail::uniform_int(rng, a, b);
  }
  if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
    const auto a = detail::as_real(lo, spec.name);
    const auto b = detail::as_real(hi, spec.name);
    if (a > b) throw ValidationError("parameter '" + spec.name + "': lo > hi");
    if (a < r->min || b > r->max)
      throw ValidationError("parameter '" + spec.name + "': bounds outside the domain");
    return detail::uniform_real(rng, a, b);
  }
  if (std::holds_alternative<BoolDomain>(spec.domain)) {
    return (rng() & 1u) != 0;
  }
  const auto& values = std::get<EnumDomain>(spec.domain).values;
  const auto idx = detail::uniform_int(rng, 0, static_cast<std::int64_t>(values.size()) - 1);
  return values[static_cast<std::size_t>(idx)];
}

// Full-domain draw.
inline Value random_value(const ParameterSpec& spec, std::mt19937_64& rng) {
  if (const auto* r = std::get_if<IntRange>(&spec.domain))
    return random_value(spec, Value(r->min), Value(r->max), rng);
  if (const auto* r = std::get_if<FloatRange>(&spec.domain))
    return random_value(spec, Value(r->min), Value(r->max), rng);
  return random_value(spec, spec.default_value, spec.default_value, rng);
}

struct Violation {
  enum class Kind { missing, unknown, out_of_domain };
  Kind kind;
  std::string name;
  std::string detail;
};

inline std::string to_string(const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::missing:
      return "missing parameter '" + v.name + "'";
    case Violation::Kind::unknown:
      return "unknown parameter '" + v.name + "'";
    default:
      return "parameter '" + v.name + "': " + v.detail;
  }
}

// Every reported problem, not just the first. ok iff the result is empty.
// Range membership is not step-aligned: finer tuning and random search
// both produce off-grid values.
inline std::vector<Violation> validate(const ParameterSpace& space, const Configuration& config) {
  std::vector<Violation> out;
  for (const auto& spec : space.params()) {
    const auto it = config.find(spec.name);
    if (it == config.end()) {
      out.push_back({Violation::Kind::missing, spec.name, ""});
    } else if (!value_in_domain(spec, it->second)) {
      out.push_back({Violation::Kind::out_of_domain, spec.name, "value out of domain"});
    }
  }
  for (const auto& [name, value] : config) {
    (void)value;
    if (!space.contains(name)) out.push_back({Violation::Kind::unknown, name, ""});
  }
  return out;
}

// Minimal decimal form plus the unit suffix; exactly what gets substituted
// into platform config files and written to the log.
inline std::string render_value(const ParameterSpec& spec, const Value& value) {
  if (!value_in_domain(spec, value))
    throw ValidationError("parameter '" + spec.name + "': cannot render out-of-domain value");
  std::string text;
  if (const auto* v = std::get_if<std::int64_t>(&value)) {
    text = std::to_string(*v);
  } else if (const auto* v = std::get_if<double>(&value)) {
    text = detail::format_double(*v);
  } else if (const auto* v = std::get_if<bool>(&value)) {
    return *v ? "true" : "false";
  } else {
    return std::get<std::string>(value);
  }
  return text + spec.unit_suffix;
}

// Inverse of render_value. The unit suffix is stripped when present; bare
// numbers are accepted too.
inline Value parse_value(const ParameterSpec& spec, std::string_view text) {
  const auto fail = [&spec, &text]() -> ValidationError {
    return ValidationError("parameter '" + spec.name + "': cannot parse value '" +
                           std::string(text) + "'");
  };
  if (std::holds_alternative<BoolDomain>(spec.domain)) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "true") return true;
    if (lower == "false") return false;
    throw fail();
  }
  if (std::holds_alternative<EnumDomain>(spec.domain)) {
    Value v{std::string(text)};
    if (!value_in_domain(spec, v)) throw fail();
    return v;
  }
  std::string_view body = text;
  if (!spec.unit_suffix.empty() && body.size() > spec.unit_suffix.size() &&
      body.substr(body.size() - spec.unit_suffix.size()) == spec.unit_suffix) {
    body.remove_suffix(spec.unit_suffix.size());
  }
  if (std::holds_alternative<IntRange>(spec.domain)) {
    std::int64_t v = 0;
    const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
    if (res.ec != std::errc() || res.ptr != body.data() + body.size()) throw fail();
    return v;
  }
  double v = 0.0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) throw fail();
  return v;
}

inline std::map<std::string, std::string> render_config(const ParameterSpace& space,
                                                        const Configuration& config) {
  std::map<std::string, std::string> out;
  for (const auto& [name, value] : config) out.emplace(name, render_value(space.at(name), value));
  return out;
}

inline Configuration parse_config(const ParameterSpace& space,
                                  const std::map<std::string, std::string>& rendered) {
  Configuration out;
  for (const auto& [name, text] : rendered) out.emplace(name, parse_value(space.at(name), text));
  return out;
}

}  // namespace tuner
