#pragma once

#include <stdexcept>
#include <string>

namespace ethmon {

/// Base of every domain error raised by the library. Callers that only care
/// about "something in the monitoring stack refused the input" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ethmon
