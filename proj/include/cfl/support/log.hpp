#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

namespace cfl::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from CAUSAL_FL_LOG (error|warn|info|debug); default warn.
inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("CAUSAL_FL_LOG");
        if (!env) return Level::Warn;
        std::string s(env);
        if (s == "error") return Level::Error;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

inline void write(Level lvl, const std::string& msg) {
    if (lvl > threshold()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(sink_mutex());
    std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

}  // namespace cfl::log
