#pragma once

#include <sstream>
#include <string>

namespace toda::log {

enum class Level { error = 0, info = 1, debug = 2 };

/// Threshold read once from TODA_LOG (error | info | debug); defaults to error.
Level threshold();
void set_threshold(Level level);
bool enabled(Level level);

/// Writes one line to stderr, prefixed with the level name.
void write(Level level, const std::string& message);

template <typename... Args>
void emit(Level level, const Args&... args) {
  if (!enabled(level)) return;
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}

template <typename... Args>
void info(const Args&... args) {
  emit(Level::info, args...);
}

template <typename... Args>
void debug(const Args&... args) {
  emit(Level::debug, args...);
}

template <typename... Args>
void error(const Args&... args) {
  emit(Level::error, args...);
}

}  // namespace toda::log
