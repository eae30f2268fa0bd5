#pragma once

#include <string_view>

namespace emgpal {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

/// Messages below the threshold are discarded. Default: warn.
void set_log_level(LogLevel level);
LogLevel log_level();

/// Writes one line to standard error.
void log(LogLevel level, std::string_view message);

}  // namespace emgpal
