#pragma once

#include <stdexcept>
#include <string>

namespace fracdeblur {

/// Bad arguments, malformed configs, shape mismatches.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable or unwritable files, bad image encodings.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite iterates or singular systems inside the solver.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, int iteration = -1)
        : std::runtime_error(what), iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

} // namespace fracdeblur
