#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hestonlt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Results go to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Fixed 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double value);

}  // namespace hestonlt::cli
