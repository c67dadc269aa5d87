#pragma once

#include <stdexcept>
#include <string>

namespace fireline {

// Base class for all library errors. Subclasses map onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, flags, or instances.
class InputError : public Error {
 public:
  using Error::Error;
};

// An enumeration guard was exceeded (oracle on a too-large instance).
class GuardError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside the LP kernel.
class LpError : public Error {
 public:
  using Error::Error;
};

enum class LogLevel { kQuiet = 0, kInfo = 1, kTrace = 2 };

// Reads FIRELINE_LOG once (quiet, info, trace). Defaults to quiet.
LogLevel log_level();
void set_log_level(LogLevel level);
void log_message(LogLevel level, const std::string& message);

inline void log_info(const std::string& message) { log_message(LogLevel::kInfo, message); }
inline void log_trace(const std::string& message) { log_message(LogLevel::kTrace, message); }

constexpr double kInf = 1e300;

}  // namespace fireline
