#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vpn {

enum class LogLevel { off = 0, info = 1, trace = 2 };

// Diagnostics level from the VPN_LOG environment variable (off|info|trace).
// Read once; everything goes to stderr so reports on stdout stay clean.
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* v = std::getenv("VPN_LOG");
    if (!v) return LogLevel::off;
    if (std::strcmp(v, "trace") == 0) return LogLevel::trace;
    if (std::strcmp(v, "info") == 0) return LogLevel::info;
    return LogLevel::off;
  }();
  return level;
}

inline bool log_enabled(LogLevel want) {
  return static_cast<int>(log_level()) >= static_cast<int>(want);
}

inline void logf(LogLevel want, const char* fmt, ...) {
  if (!log_enabled(want)) return;
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
  va_end(args);
}

}  // namespace vpn
