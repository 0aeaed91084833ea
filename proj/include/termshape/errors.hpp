#pragma once

#include <stdexcept>
#include <string>

namespace termshape {

// Invalid user input: bad expression syntax, parameter constraint
// violations, malformed grids or run configs. CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure while computing: non-finite values, domain errors inside a
// stencil, blow-up of an ODE integration. CLI maps this to exit 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace termshape
