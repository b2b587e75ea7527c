#pragma once

#include <array>
#include <cstdio>
#include <string>

namespace hfs {

/// 17 significant digits, round-trips every finite double.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Column names of the 16 real coordinates of a density matrix, in storage order.
inline const std::array<std::string, 16>& state_column_names()
{
    static const std::array<std::string, 16> names{
        "rho11",    "rho22",    "rho33",    "rho44",    "re_rho21", "im_rho21", "re_rho31", "im_rho31",
        "re_rho32", "im_rho32", "re_rho41", "im_rho41", "re_rho42", "im_rho42", "re_rho43", "im_rho43"};
    return names;
}

} // namespace hfs
