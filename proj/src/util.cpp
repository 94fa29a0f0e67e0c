#include "mhdlab/util.hpp"

#include <cstdio>
#include <iostream>
#include <mutex>

namespace mhd {
namespace log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& sink() {
  static Sink s = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

Sink set_warning_sink(Sink next) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  Sink prev = sink();
  sink() = std::move(next);
  return prev;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink()) sink()(message);
}

}  // namespace log

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace mhd
