#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cridx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed defining-function text. `position()` is the 0-based offset of
/// the offending character.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at column " + std::to_string(position + 1) + ")"), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation outside the domain of a node (log/sqrt of a non-positive real,
/// division by zero, non-real result).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Newton projection onto {rho = 0} failed.
class ProjectionError : public Error {
public:
    using Error::Error;
};

/// Too few boundary points could be found in the sampling box.
class SamplingError : public Error {
public:
    using Error::Error;
};

/// A boundary sample has a Levi form with a negative eigenvalue.
class PseudoconvexityError : public Error {
public:
    using Error::Error;
};

}  // namespace cridx
