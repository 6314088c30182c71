#pragma once

#include <stdexcept>
#include <string>

namespace xicse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in ambient spaces of different dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument violates an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Pairing or membership needs the coefficients of an infinite tail.
class UndefinedForInfiniteTail : public Error {
public:
    using Error::Error;
};

/// Restriction of a weight to a coordinate subspace is identically -inf.
class IdenticallyNegInfinite : public Error {
public:
    using Error::Error;
};

/// The requested quantity does not exist (zero kernel, no computing functional).
class NotAvailable : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to produce a usable value.
class NumericFailure : public Error {
public:
    using Error::Error;
};

}  // namespace xicse
