#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pnt::cli {

// Exit status: 0 success or verified, 1 violation found, 2 usage or input error.
inline constexpr int kOk = 0;
inline constexpr int kViolation = 1;
inline constexpr int kUsage = 2;

// Environment variable holding the default working precision in bits.
inline constexpr const char* kPrecisionEnv = "PNT_PRECISION";

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 1.21103e2 -> 121.103; very large or small exponents stay in e-notation.
std::string plain_decimal(const std::string& sci);

}  // namespace pnt::cli
