#pragma once

#include <stdexcept>
#include <string>

namespace torb {

// Domain errors carry enough text to act on; the CLI maps them to exit code 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParameter : Error {
    using Error::Error;
};

// A candidate cannot be built for the requested lattice/volumes; message names the bound.
struct Infeasible : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// Volume-constraint Gram system singular or ill-conditioned.
struct DegenerateConstraint : Error {
    using Error::Error;
};

struct ProjectionFailure : Error {
    using Error::Error;
};

// Anchored body volume fell outside (0, det): stale volume constant.
struct AnchorError : Error {
    using Error::Error;
};

// Ray classification failed repeatedly (point_region / Monte Carlo oracle).
struct ClassificationError : Error {
    using Error::Error;
};

struct UnsupportedLattice : Error {
    using Error::Error;
};

struct ResolutionError : Error {
    using Error::Error;
};

} // namespace torb
