#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tuner/param_space.hpp"

namespace tuner {

// Parameter-space file: JSON Lines. The first record is a header
// {"format":"tuner-space","platform":...}; every following line describes
// one parameter. Keys are emitted in lexicographic order, records in space
// order, so dumps are byte-stable.

namespace detail {

inline nlohmann::json value_to_json(const Value& v) {
  if (const auto* p = std::get_if<std::int64_t>(&v)) return *p;
  if (const auto* p = std::get_if<double>(&v)) return *p;
  if (const auto* p = std::get_if<bool>(&v)) return *p;
  return std::get<std::string>(v);
}

inline nlohmann::json spec_to_json(const ParameterSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["default"] = value_to_json(spec.default_value);
  if (const auto* r = std::get_if<IntRange>(&spec.domain)) {
    j["type"] = "int";
    j["min"] = r->min;
    j["max"] = r->max;
    j["step"] = r->step;
  } else if (const auto* r = std::get_if<FloatRange>(&spec.domain)) {
    j["type"] = "float";
    j["min"] = r->min;
    j["max"] = r->max;
    j["step"] = r->step;
  } else if (std::holds_alternative<BoolDomain>(spec.domain)) {
    j["type"] = "bool";
  } else {
    j["type"] = "enum";
    j["values"] = std::get<EnumDomain>(spec.domain).values;
  }
  if (spec.influential) j["influential"] = true;
  if (spec.finer_step) j["finer_step"] = *spec.finer_step;
  if (!spec.unit_suffix.empty()) j["unit_suffix"] = spec.unit_suffix;
  return j;
}

inline ParameterSpec spec_from_json(const nlohmann::json& j) {
  ParameterSpec spec;
  spec.name = j.at("name").get<std::string>();
  const auto type = j.at("type").get<std::string>();
  if (type == "int") {
    spec.domain = IntRange{j.at("min").get<std::int64_t>(), j.at("max").get<std::int64_t>(),
                           j.value("step", std::int64_t{1})};
    spec.default_value = j.at("default").get<std::int64_t>();
  } else if (type == "float") {
    spec.domain =
        FloatRange{j.at("min").get<double>(), j.at("max").get<double>(), j.value("step", 1.0)};
    spec.default_value = j.at("default").get<double>();
  } else if (type == "bool") {
    spec.domain = BoolDomain{};
    spec.default_value = j.at("default").get<bool>();
  } else if (type == "enum") {
    spec.domain = EnumDomain{j.at("values").get<std::vector<std::string>>()};
    spec.default_value = j.at("default").get<std::string>();
  } else {
    throw ValidationError("parameter '" + spec.name + "': unknown type '" + type + "'");
  }
  if (j.contains("influential")) spec.influential = j.at("influential").get<bool>();
  if (j.contains("finer_step")) spec.finer_step = j.at("finer_step").get<double>();
  if (j.contains("unit_suffix")) spec.unit_suffix = j.at("unit_suffix").get<std::string>();
  return spec;
}

}  // namespace detail

inline void dump_space(std::ostream& out, const ParameterSpace& space) {
  nlohmann::json header;
  header["format"] = "tuner-space";
  header["platform"] = space.platform_tag();
  out << header.dump() << '\n';
  for (const auto& spec : space.params()) out << detail::spec_to_json(spec).dump() << '\n';
}

inline std::string dump_space(const ParameterSpace& space) {
  std::ostringstream out;
  dump_space(out, space);
  return out.str();
}

inline ParameterSpace load_space(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::string platform = "custom";
  std::vector<ParameterSpec> params;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("space file line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!saw_header) {
      if (!j.contains("format") || j.at("format") != "tuner-space")
        throw ValidationError("space file line 1: expected a tuner-space header record");
      platform = j.value("platform", "custom");
      saw_header = true;
      continue;
    }
    try {
      params.push_back(detail::spec_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("space file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!saw_header) throw ValidationError("space file is empty");
  return ParameterSpace(platform, std::move(params));
}

inline ParameterSpace load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RunError("cannot open space file '" + path + "'");
  return load_space(in);
}

}  // namespace tuner
