#pragma once

#include <string>

namespace randsplit {

/// Diagnostic verbosity, read once from RANDSPLIT_LOG (off | step | debug).
enum class LogLevel { Off = 0, Step = 1, Debug = 2 };

LogLevel log_level();
LogLevel parse_log_level(const std::string& value);
/// Writes one line to stderr; safe to call from several workers.
void log_line(const std::string& line);

}  // namespace randsplit
