#pragma once

#include <stdexcept>
#include <string>

namespace bpb {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller passed something outside an operation's domain.
struct InputError : Error {
    using Error::Error;
};

struct UnsupportedDimensionError : Error {
    using Error::Error;
};

/// Norming family does not define a norm (rank-deficient, unbounded ball).
struct InvalidSpaceError : Error {
    using Error::Error;
};

/// A construction failed a postcondition it is supposed to guarantee.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace bpb
