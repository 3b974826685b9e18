#pragma once

#include <stdexcept>
#include <string>

namespace tuner {

// Caller passed something malformed: bad option set, value outside its
// domain, unknown parameter name. Maps to CLI exit code 1.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Infrastructure failure: unreadable file, broken evaluator, failed round.
// Maps to CLI exit code 2.
struct RunError : std::runtime_error {
  explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

// A search finished without a single successful trial. Maps to CLI exit
// code 3.
struct NoIncumbentError : std::runtime_error {
  explicit NoIncumbentError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tuner
