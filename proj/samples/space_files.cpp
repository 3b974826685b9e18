// Defines a small custom parameter space, writes it to the space file
// format and reads it back.

#include <iostream>
#include <sstream>

#include "tuner/param_space.hpp"
#include "tuner/space_io.hpp"

int main() {
  using namespace tuner;

  ParameterSpace space(
      "custom",
      {{"worker.threads", IntRange{1, 64, 8}, Value(std::int64_t{8}), true, 2.0, ""},
       {"cache.fraction", FloatRange{0.1, 0.9, 0.1}, Value(0.5), false, std::nullopt, ""},
       {"compress.output", BoolDomain{}, Value(true), false, std::nullopt, ""},
       {"io.mode", EnumDomain{{"sync", "async", "direct"}}, Value(std::string("async")), false,
        std::nullopt, ""}});

  const auto text = dump_space(space);
  std::cout << text << "\n";

  std::istringstream in(text);
  const auto loaded = load_space(in);
  std::cout << "reloaded " << loaded.size() << " parameters; grid candidates for "
            << loaded.params()[0].name << ":";
  for (const auto& v : sample_values(loaded.params()[0]))
    std::cout << " " << render_value(loaded.params()[0], v);
  std::cout << "\n";
  return 0;
}
