#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>

namespace cascadia {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

namespace detail {

inline LogLevel level_from_env() {
    const char* v = std::getenv("CASCADIA_LOG");
    if (v == nullptr) return LogLevel::warn;
    if (std::strcmp(v, "error") == 0) return LogLevel::error;
    if (std::strcmp(v, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(v, "info") == 0) return LogLevel::info;
    if (std::strcmp(v, "debug") == 0) return LogLevel::debug;
    return LogLevel::warn;
}

inline LogLevel& log_threshold() {
    static LogLevel level = level_from_env();
    return level;
}

using LogHandler = std::function<void(LogLevel, const std::string&)>;

inline LogHandler& log_handler() {
    static LogHandler handler; // empty = stderr
    return handler;
}

inline const char* level_name(LogLevel l) {
    switch (l) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

} // namespace detail

inline void set_log_threshold(LogLevel level) { detail::log_threshold() = level; }

/// Redirect log output (used by tests); pass nullptr-like {} to restore stderr.
inline void set_log_handler(detail::LogHandler handler) { detail::log_handler() = std::move(handler); }

inline void log_message(LogLevel level, const std::string& msg) {
    if (level > detail::log_threshold()) return;
    if (detail::log_handler()) {
        detail::log_handler()(level, msg);
        return;
    }
    std::fprintf(stderr, "[cascadia][%s] %s\n", detail::level_name(level), msg.c_str());
}

inline void log_error(const std::string& msg) { log_message(LogLevel::error, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_message(LogLevel::debug, msg); }

} // namespace cascadia
