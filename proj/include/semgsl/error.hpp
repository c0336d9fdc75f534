#pragma once

#include <stdexcept>

namespace semgsl {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every weight of a vector that must be normalized is zero. Signals
/// contradictory evidence, not a numeric accident.
struct AllZeroError : Error {
    using Error::Error;
};

/// A weight is negative, NaN or otherwise not a usable magnitude.
struct InvalidWeightError : Error {
    using Error::Error;
};

struct OutOfBoundsError : Error {
    using Error::Error;
};

struct UnknownRoomError : Error {
    using Error::Error;
};

/// Brute-force instance exceeds the enumeration budget.
struct TooLargeError : Error {
    using Error::Error;
};

/// Two distributions that must share a domain do not.
struct DomainMismatchError : Error {
    using Error::Error;
};

struct EmptyCandidatesError : Error {
    using Error::Error;
};

/// Bad configuration input: missing file, malformed JSON, failed validation.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace semgsl
