#include "mufor/log.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mufor {
namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::kWarning)};
std::mutex g_mutex;

void emit(const char* tag, const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[mufor] " << tag << ": " << message << '\n';
}

}  // namespace

void set_log_level(LogLevel level) { g_level = static_cast<int>(level); }
LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

void log_warning(const std::string& message) {
  if (g_level >= static_cast<int>(LogLevel::kWarning)) emit("warning", message);
}

void log_info(const std::string& message) {
  if (g_level >= static_cast<int>(LogLevel::kInfo)) emit("info", message);
}

}  // namespace mufor
