#pragma once

#include <stdexcept>
#include <string>

namespace brlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Enumeration or group closure exceeded its configured cap.
struct ResourceError : Error {
    using Error::Error;
};

/// Input violates a documented precondition or invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// A constructive correspondence failed its internal consistency check.
/// Carries the offending deviation so callers can report it.
struct ConstructionError : Error {
    ConstructionError(const std::string& msg, double dev) : Error(msg), deviation(dev) {}
    double deviation = 0.0;
};

}  // namespace brlab
