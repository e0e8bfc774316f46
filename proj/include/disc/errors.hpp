#pragma once

#include <stdexcept>
#include <string>

namespace disc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The Gaussian draw fell outside the ||x|| <= R cutoff.
struct RadiusExceeded : Error {
    explicit RadiusExceeded(double norm, double radius)
        : Error("gaussian sample norm " + std::to_string(norm) +
                " exceeds cutoff R = " + std::to_string(radius)),
          norm(norm), radius(radius) {}
    double norm;
    double radius;
};

/// Oracle projection needs a positive inner radius and none is known.
struct NoInnerRadius : Error {
    NoInnerRadius() : Error("body has no known inner radius") {}
};

/// Translation center must lie strictly inside (-1,1)^n.
struct CenterOnBoundary : Error {
    explicit CenterOnBoundary(int index, double value)
        : Error("translation center coordinate " + std::to_string(index) + " = " +
                std::to_string(value) + " is not strictly inside (-1,1)") {}
};

/// A statistically verified precondition failed before the check proper ran.
struct PreconditionUnmet : Error {
    using Error::Error;
};

/// Input file does not match the declared schema; message carries the field path.
struct SchemaError : Error {
    using Error::Error;
};

/// A projection subroutine failed to converge where the caller required it.
struct ProjectionFailed : Error {
    using Error::Error;
};

}  // namespace disc
