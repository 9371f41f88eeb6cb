#pragma once

#include <stdexcept>
#include <string>

namespace tds {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Rejected input: precondition or invariant violation.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Mixed or unexpected altitude datum.
class DatumError : public ValidationError {
public:
    explicit DatumError(const std::string& what) : ValidationError(what) {}
};

/// Point query outside the modeled region.
class OutOfRegionError : public ValidationError {
public:
    explicit OutOfRegionError(const std::string& what) : ValidationError(what) {}
};

/// Malformed or unsupported input file.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace tds
