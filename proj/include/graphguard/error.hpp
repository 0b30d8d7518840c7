#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphguard {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file or config does not match the declared schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// A metric is not defined for the given labels (e.g. no positives).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

enum class LogLevel { kQuiet, kWarn, kInfo };

void set_log_level(LogLevel level);
LogLevel log_level();
void warn(std::string_view message);
void info(std::string_view message);

}  // namespace graphguard
