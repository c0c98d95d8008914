#pragma once

#include <stdexcept>
#include <string>

namespace docsynth {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or unknown configuration; CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Input document violates its schema; carries the JSON-ish path of the
// offending node.
struct SchemaError : Error {
  std::string path;
  SchemaError(std::string at, const std::string& msg)
      : Error(at + ": " + msg), path(std::move(at)) {}
};

struct GatewayError : Error {
  using Error::Error;
};

}  // namespace docsynth
