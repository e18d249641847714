#pragma once

#include <sstream>
#include <string>

namespace recbias::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_level(Level level);
Level level();

void write(Level level, const std::string& message);

namespace detail {
template <class... Parts>
std::string concat(Parts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}
}  // namespace detail

template <class... Parts>
void debug(Parts&&... parts) {
  if (level() <= Level::debug) write(Level::debug, detail::concat(parts...));
}
template <class... Parts>
void info(Parts&&... parts) {
  if (level() <= Level::info) write(Level::info, detail::concat(parts...));
}
template <class... Parts>
void warn(Parts&&... parts) {
  if (level() <= Level::warn) write(Level::warn, detail::concat(parts...));
}
template <class... Parts>
void error(Parts&&... parts) {
  if (level() <= Level::error) write(Level::error, detail::concat(parts...));
}

}  // namespace recbias::log
