#pragma once

#include "tors/cyclotomic.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace tors::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kVerificationFailure = 1;
constexpr int kUsage = 2;
constexpr int kExhausted = 3;

extern const char* const kToolVersion;
extern const char* const kManifestSchema;

// Sums of terms like "3/2", "z5", "z5^4", "-2*z8^3", parenthesised products
// allowed. The field is Q(zeta_M) with M the lcm of the zN appearing.
CyclotomicNumber parse_cyclotomic(const std::string& s);

std::string sha256_hex(const std::string& bytes);

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tors::cli
