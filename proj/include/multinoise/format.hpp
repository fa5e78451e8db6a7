// format.hpp: locale-free number formatting for CSV / JSON artifacts

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace multinoise {

// Shortest form is not enough for byte-stable output across libraries, so
// every double is printed with exactly 17 significant digits.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

} // namespace multinoise
