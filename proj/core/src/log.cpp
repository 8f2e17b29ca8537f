#include "toda/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace toda::log {

namespace {

Level from_env() {
  const char* raw = std::getenv("TODA_LOG");
  if (raw == nullptr) return Level::error;
  const std::string_view value(raw);
  if (value == "debug") return Level::debug;
  if (value == "info") return Level::info;
  return Level::error;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::string_view name(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

bool enabled(Level level) { return static_cast<int>(level) <= current().load(); }

void write(Level level, const std::string& message) {
  std::lock_guard lock(sink_mutex());
  std::cerr << "[toda " << name(level) << "] " << message << '\n';
}

}  // namespace toda::log
