#pragma once

#include <string_view>

namespace phe {

void log_warning(std::string_view message);

}  // namespace phe
