#pragma once

#include <stdexcept>
#include <string>

namespace canm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Dimension mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A rank requirement cannot be met (e.g. an empty nullspace).
class RankError : public Error {
public:
    using Error::Error;
};

/// Requested size exceeds what the index type can represent.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Matrix expected to be positive semidefinite has a significantly negative eigenvalue.
class NotPsdError : public Error {
public:
    using Error::Error;
};

/// Hypothesis of the exact-recovery theorem is violated.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or scenario file.
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace canm
