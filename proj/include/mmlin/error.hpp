#pragma once

#include <stdexcept>
#include <string>

namespace mmlin {

/// Bad parameters, preconditions, or malformed input data.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// The integrator (or another numerical kernel) could not produce a result.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmlin
