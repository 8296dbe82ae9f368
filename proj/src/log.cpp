#include "specsing/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace specsing::log {
namespace {

spdlog::level::level_enum level_from_env() {
  const char* raw = std::getenv("SPECSING_LOG");
  const std::string value = raw ? raw : "";
  if (value == "debug") return spdlog::level::debug;
  if (value == "info") return spdlog::level::info;
  if (value == "error") return spdlog::level::err;
  return spdlog::level::warn;
}

std::shared_ptr<spdlog::logger> make_logger() {
  auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
  auto lg = std::make_shared<spdlog::logger>("specsing", sink);
  lg->set_pattern("[%l] %v");
  lg->set_level(level_from_env());
  return lg;
}

}  // namespace

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = make_logger();
  return *instance;
}

void configure_from_env() { logger().set_level(level_from_env()); }

}  // namespace specsing::log
