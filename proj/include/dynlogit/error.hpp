#pragma once

#include <stdexcept>
#include <string>

namespace dynlogit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `location` is "line N" or a JSON path.
class ParseError : public Error {
public:
    ParseError(const std::string& location, const std::string& message)
        : Error(location + ": " + message), location_(location) {}
    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

/// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// A lag window reaches a time index that was not observed.
class GapError : public Error {
public:
    GapError(int t, int missing)
        : Error("lag window of t=" + std::to_string(t) + " needs unobserved t=" + std::to_string(missing)),
          t_(t), missing_(missing) {}
    int t() const noexcept { return t_; }
    int missing() const noexcept { return missing_; }

private:
    int t_;
    int missing_;
};

/// Model specification problem (unknown attribute, bad term parameters, ...).
class SpecError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Design construction found no usable transition steps.
class EmptyDesignError : public Error {
public:
    using Error::Error;
};

}  // namespace dynlogit
