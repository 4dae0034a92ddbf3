#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string_view>

namespace hft {

enum class LogLevel { Quiet = 0, Warning = 1, Info = 2, Debug = 3 };

namespace detail {
inline std::atomic<LogLevel>& log_level() {
  static std::atomic<LogLevel> level{LogLevel::Warning};
  return level;
}
inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
inline void emit(LogLevel level, std::string_view tag, std::string_view message) {
  if (log_level().load() < level) return;
  std::lock_guard lock(log_mutex());
  std::clog << "[hft " << tag << "] " << message << '\n';
}
}  // namespace detail

inline void set_log_level(LogLevel level) { detail::log_level() = level; }
inline LogLevel log_level() { return detail::log_level().load(); }

inline void log_warning(std::string_view m) { detail::emit(LogLevel::Warning, "warn", m); }
inline void log_info(std::string_view m) { detail::emit(LogLevel::Info, "info", m); }
inline void log_debug(std::string_view m) { detail::emit(LogLevel::Debug, "debug", m); }

}  // namespace hft
