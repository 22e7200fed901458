#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace droneplan {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user input: malformed scenario, out-of-range parameter, broken
// type invariant (coincident heads, non-finite coordinate, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Problem size exceeds a hard algorithmic bound (e.g. exact ordering
// beyond the dynamic-programming limit).
struct CapacityError : Error {
    using Error::Error;
};

// A path segment has zero length, so the length gradient is undefined.
struct DegenerateSegmentError : Error {
    std::size_t segment;
    DegenerateSegmentError(const std::string& msg, std::size_t seg)
        : Error(msg), segment(seg) {}
};

// The tour bends by zero angle at a head (head lies straight between its
// neighbours), so the inward offset direction for the initial guess is
// undefined.
struct DegenerateBisectorError : Error {
    std::size_t head;
    DegenerateBisectorError(const std::string& msg, std::size_t h)
        : Error(msg), head(h) {}
};

// A segment is at or below the merge threshold; coefficient assembly would
// divide by (nearly) zero.
struct MergePendingError : Error {
    std::size_t segment;
    MergePendingError(const std::string& msg, std::size_t seg)
        : Error(msg), segment(seg) {}
};

// The bordered system is singular or numerically unusable.
struct SingularSystemError : Error {
    double rcond;
    SingularSystemError(const std::string& msg, double rc)
        : Error(msg), rcond(rc) {}
};

// Requested length outside the range covered by a trace.
struct RangeError : Error {
    using Error::Error;
};

// Requested target length outside the solvable interval.
struct InfeasibleTargetError : Error {
    using Error::Error;
};

// File-system failure while reading or writing artifacts.
struct IoError : Error {
    using Error::Error;
};

}  // namespace droneplan
