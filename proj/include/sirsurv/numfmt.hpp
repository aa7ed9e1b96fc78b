#pragma once

#include <string>

namespace sirsurv {

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace sirsurv
