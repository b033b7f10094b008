#include "phe/log.hpp"

#include <iostream>
#include <mutex>

namespace phe {

void log_warning(std::string_view message) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::clog << "warning: " << message << '\n';
}

}  // namespace phe
