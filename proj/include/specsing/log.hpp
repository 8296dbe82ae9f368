#pragma once

// Diagnostics on standard error. The level comes from SPECSING_LOG
// (error, warn, info, debug); default warn. Never used for data output.

#include <spdlog/spdlog.h>

#include <utility>

namespace specsing::log {

spdlog::logger& logger();

// Re-reads SPECSING_LOG.
void configure_from_env();

template <typename... Args>
void debug(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().debug(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void info(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().info(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void warn(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().warn(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void error(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().error(fmt, std::forward<Args>(args)...);
}

}  // namespace specsing::log
