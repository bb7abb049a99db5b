#include "fermi_slab/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace fslab::log {
namespace {
std::atomic<bool> g_quiet{false};
std::mutex g_mutex;
}  // namespace

void set_quiet(bool q) { g_quiet = q; }
bool quiet() { return g_quiet; }

void info(std::string_view message) {
  if (g_quiet) return;
  std::lock_guard lock(g_mutex);
  std::clog << message << '\n';
}

void warn(std::string_view message) {
  if (g_quiet) return;
  std::lock_guard lock(g_mutex);
  std::clog << "warning: " << message << '\n';
}

}  // namespace fslab::log
