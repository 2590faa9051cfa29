#pragma once

#include <stdexcept>
#include <string>

namespace doorcount {

/// Bad parameters, bad config values, precondition violations on inputs.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File system failures and malformed input files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant did not hold. Always a bug.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace doorcount
