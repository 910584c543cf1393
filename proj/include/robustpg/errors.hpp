#pragma once

#include <stdexcept>
#include <string>

namespace robustpg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A root-finding bracket does not straddle the target.
class BracketError : public Error {
public:
    using Error::Error;
};

/// An iterative method exhausted its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The means do not admit a solution in the requested case.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// The operation is not defined for this case or distribution.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A closed form is singular at a full-mean endpoint; only its limit exists.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A file could not be read, written or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace robustpg
