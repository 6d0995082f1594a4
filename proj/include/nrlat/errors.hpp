#pragma once

#include <stdexcept>
#include <string>

namespace nrlat {

/// Invalid parameter combination or malformed input.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A packet cannot be placed on the grid at all (wider than the carrier).
class InfeasibleAllocation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A CQI that maps to no usable MCS in the selected table.
class NoTransmission : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace nrlat
