#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace adaptis {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration: inverted boxes, bad exponents, empty grids.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Caller passed an argument outside the operation's contract (e.g. n = 0).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Parameter outside a family's admissible set or a formula's support.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite arithmetic (overflowed likelihood ratio, NaN update).
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what,
                            std::optional<std::size_t> iteration = std::nullopt)
        : Error(what), iteration_(iteration) {}
    std::optional<std::size_t> iteration() const noexcept { return iteration_; }

private:
    std::optional<std::size_t> iteration_;
};

/// Root bracket has no sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Weighted empirical distribution never reaches the requested level.
class LevelUnreachableError : public Error {
public:
    using Error::Error;
};

/// Inner solve of an adaptive run failed at a given iteration.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::size_t iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

class DecompositionError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace adaptis
