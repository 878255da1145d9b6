#pragma once

#include <stdexcept>
#include <string>

namespace expmapkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument/precondition violations (CLI maps these to exit code 2 or 4).
struct InvalidInput : Error {
    using Error::Error;
};

// exp(Re z) left the double range; caller should switch to tower arithmetic.
struct RangeExceeded : Error {
    using Error::Error;
};

// The omitted value a has no preimage.
struct SingularValueHit : Error {
    using Error::Error;
};

struct PullbackHitSingularValue : Error {
    using Error::Error;
};

struct NotConverged : Error {
    NotConverged(const std::string& msg, double failing_t)
        : Error(msg), t(failing_t) {}
    double t;
};

struct IncompatibleAddress : Error {
    using Error::Error;
};

struct NotEscaping : Error {
    using Error::Error;
};

struct LocateFailed : Error {
    using Error::Error;
};

struct OutOfTracedRange : Error {
    using Error::Error;
};

struct GammaThroughSingularValue : Error {
    using Error::Error;
};

struct NonMonotoneCurves : Error {
    using Error::Error;
};

struct PrefixTooShort : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

}  // namespace expmapkit
