#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace lexreg {

using instant = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with an optional "Z" or
// "+HH:MM"/"-HH:MM" offset. Fractional seconds are truncated.
instant parse_iso8601(std::string_view text);

// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(instant t);

}  // namespace lexreg
