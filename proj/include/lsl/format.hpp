#pragma once

#include <string>

namespace lsl {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace lsl
