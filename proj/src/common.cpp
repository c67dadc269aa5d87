#include "fireline/common.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace fireline {
namespace {

LogLevel parse_env() {
  const char* value = std::getenv("FIRELINE_LOG");
  if (value == nullptr) return LogLevel::kQuiet;
  std::string s(value);
  if (s == "info") return LogLevel::kInfo;
  if (s == "trace") return LogLevel::kTrace;
  return LogLevel::kQuiet;
}

std::atomic<int>& level_storage() {
  static std::atomic<int> level{static_cast<int>(parse_env())};
  return level;
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_storage().load()); }

void set_log_level(LogLevel level) { level_storage().store(static_cast<int>(level)); }

void log_message(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > level_storage().load()) return;
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[fireline] " << message << '\n';
}

}  // namespace fireline
