#pragma once

#include <string>

namespace bsf {

/// Shortest decimal string that round-trips the exact double value.
/// Gives byte-stable CSV/JSON output across runs and platforms.
std::string format_double(double value);

}  // namespace bsf
