#pragma once

#include <string_view>

namespace fslab::log {

void set_quiet(bool quiet);
bool quiet();

void info(std::string_view message);
void warn(std::string_view message);

}  // namespace fslab::log
