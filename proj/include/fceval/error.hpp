#pragma once

#include <stdexcept>
#include <string>

namespace fceval {

/// Broad failure classes. The C API maps each kind onto a status code and
/// the CLI onto an exit code.
enum class ErrorKind {
    Domain,            // argument outside the mathematical domain of an operation
    InsufficientData,  // series/matrix too short for the requested geometry
    Config,            // malformed or unknown configuration
    Validation,        // data fails an integrity check (misaligned keys, leakage)
    Undefined,         // undefined measure term under the `error` policy
    Io,                // file could not be read or written
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class InsufficientDataError : public Error {
public:
    explicit InsufficientDataError(const std::string& what)
        : Error(ErrorKind::InsufficientData, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class UndefinedValueError : public Error {
public:
    explicit UndefinedValueError(const std::string& what) : Error(ErrorKind::Undefined, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace fceval
