#pragma once

#include <stdexcept>
#include <string>

namespace vcma {

/// Raised when a parameter set or input violates its declared invariants.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical solve cannot produce a result (e.g. singular system).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vcma
