#pragma once

#include <stdexcept>
#include <string>

namespace kgw {

/// Raised when an argument violates an operation's stated precondition.
/// The message names the violated condition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to reach its accuracy target
/// (no convergence, drift beyond tolerance, ambiguous eigenvalues).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw PreconditionError(what);
}

} // namespace kgw
