#pragma once

#include <stdexcept>
#include <string>

namespace csa {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point lies outside the simulation domain.
struct DomainError : Error {
    using Error::Error;
};

/// Invalid or inconsistent configuration (bad bounds, grid mismatch, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// An operation refused to run because one of its preconditions fails.
struct RefusalError : Error {
    using Error::Error;
};

/// Acceptance-rejection sampling exhausted its attempt budget.
struct StallError : Error {
    using Error::Error;
};

}  // namespace csa
