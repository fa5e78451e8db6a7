// sign.hpp: creation / annihilation marker shared by operator words

#pragma once

#include <stdexcept>
#include <string>

namespace multinoise {

enum class Sign { minus, plus };

inline char to_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

inline Sign sign_from_char(char c)
{
    if (c == '+') return Sign::plus;
    if (c == '-') return Sign::minus;
    throw std::invalid_argument(std::string("sign must be '+' or '-', got '") + c + "'");
}

} // namespace multinoise
