#pragma once

#include <stdexcept>
#include <string>

namespace microlocal {

/// Raised when a value fails validation at construction time (bad shapes,
/// d∘d ≠ 0, non-commuting generization squares, malformed towers).
class InvalidInput : public std::invalid_argument
{
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an operation is called outside its precondition.
class PreconditionError : public std::logic_error
{
public:
    explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

} // namespace microlocal
