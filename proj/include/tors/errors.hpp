#pragma once

#include <stdexcept>
#include <string>

namespace tors {

// Precision requested beyond the configured maximum, or a numeric certificate
// could not be obtained at the maximum precision.
class PrecisionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// An enumeration ran out of budget; `token` resumes it.
class BudgetExceeded : public std::runtime_error {
  public:
    BudgetExceeded(const std::string& what, std::string token)
        : std::runtime_error(what), token(std::move(token)) {}
    std::string token;
};

class BadReduction : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class BadPrime : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Certificate or invariant violated during an exact re-check.
class VerificationFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace tors
