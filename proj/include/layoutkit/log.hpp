#pragma once
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace layoutkit {

// Raised for malformed or missing inputs (CLI exit code 2).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a structural invariant is violated (CLI exit code 3).
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the HL3D_LOG environment variable; defaults to warn.
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("HL3D_LOG");
    if (!env) return LogLevel::Warn;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

template <typename... Args>
void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
  if (lvl > log_level()) return;
  std::fprintf(stderr, "[%s] ", tag);
  if constexpr (sizeof...(Args) == 0) {
    std::fputs(fmt, stderr);
  } else {
    std::fprintf(stderr, fmt, args...);
  }
  std::fputc('\n', stderr);
}

#define LK_ERROR(...) ::layoutkit::log_at(::layoutkit::LogLevel::Error, "error", __VA_ARGS__)
#define LK_WARN(...) ::layoutkit::log_at(::layoutkit::LogLevel::Warn, "warn", __VA_ARGS__)
#define LK_INFO(...) ::layoutkit::log_at(::layoutkit::LogLevel::Info, "info", __VA_ARGS__)
#define LK_DEBUG(...) ::layoutkit::log_at(::layoutkit::LogLevel::Debug, "debug", __VA_ARGS__)

}  // namespace layoutkit
