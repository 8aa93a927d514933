#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace subdiff {

/// Invalid input: parameters outside their domain, malformed configuration,
/// incompatible meshes. The CLI maps these to exit code 1.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its result. The CLI maps these to
/// exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AccuracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Raised by the Isakov update when the terminal data is too close to zero.
class SmallDivisorError : public NumericalError {
public:
    SmallDivisorError(const std::string& what, std::vector<int> nodes)
        : NumericalError(what), nodes_(std::move(nodes)) {}

    const std::vector<int>& nodes() const noexcept { return nodes_; }

private:
    std::vector<int> nodes_;
};

}  // namespace subdiff
