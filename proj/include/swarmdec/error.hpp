#pragma once

#include <stdexcept>
#include <string>

namespace swarmdec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A state transition would leave 0 <= K <= N.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A noise flip was requested with zero propensity (no agent to flip).
class InfeasibleFlipError : public Error {
public:
    using Error::Error;
};

/// Input too large for exhaustive enumeration.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Total propensity is zero; the chain cannot advance.
class FrozenSystemError : public Error {
public:
    using Error::Error;
};

/// Two rule sets passed as complements are not.
class ComplementMismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace swarmdec
