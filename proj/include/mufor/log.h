#pragma once

#include <string>

namespace mufor {

enum class LogLevel { kQuiet = 0, kWarning = 1, kInfo = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();

// Both write one line to standard error when the level allows it.
void log_warning(const std::string& message);
void log_info(const std::string& message);

}  // namespace mufor
