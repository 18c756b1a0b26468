#include "randsplit/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace randsplit {

LogLevel parse_log_level(const std::string& value) {
    if (value == "step") return LogLevel::Step;
    if (value == "debug") return LogLevel::Debug;
    return LogLevel::Off;
}

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("RANDSPLIT_LOG");
        return env ? parse_log_level(env) : LogLevel::Off;
    }();
    return level;
}

void log_line(const std::string& line) {
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << line << '\n';
}

}  // namespace randsplit
