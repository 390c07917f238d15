#pragma once

#include <string>

namespace ldtail {

/// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_real(double value);

/// Shortest representation that round-trips.
std::string format_short(double value);

}  // namespace ldtail
