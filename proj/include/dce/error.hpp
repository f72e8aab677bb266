#pragma once

#include <stdexcept>
#include <string>

namespace dce {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Numerical-integrity failures: trace/Hermiticity/positivity drift and
// step-size underflow in the integrator.
class IntegrityError : public Error {
public:
    using Error::Error;
};

class StiffnessError : public IntegrityError {
public:
    using IntegrityError::IntegrityError;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& what)
        : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path)) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

}  // namespace dce
