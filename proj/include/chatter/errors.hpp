#pragma once

#include <stdexcept>
#include <string>

namespace chatter {

// Base for everything this library throws. The two intermediate bases let
// callers (mainly the CLI) map failures to exit codes without enumerating
// every concrete type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad or unreadable input data (files, labels, signals too short, ...).
struct DataError : Error {
  using Error::Error;
};

// A numeric procedure could not produce a result (no significant frequency,
// solver did not converge, degenerate bounds, ...).
struct NumericError : Error {
  using Error::Error;
};

// Invalid configuration or arguments.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace chatter
