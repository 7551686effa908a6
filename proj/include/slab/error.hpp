#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slab {

/// Base class for every error raised by the kernel.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression source. `position()` is a 0-based byte offset.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& message)
        : Error("syntax error at " + std::to_string(position) + ": " + message), position_(position)
    {
    }
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownIdentifier : public Error {
public:
    using Error::Error;
};

class VariableOutOfRange : public Error {
public:
    using Error::Error;
};

/// Expression evaluated outside its domain (log of a non-positive number, division by zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class NotSPD : public Error {
public:
    using Error::Error;
};

class OutsideDomain : public Error {
public:
    using Error::Error;
};

class NotSteady : public Error {
public:
    using Error::Error;
};

class ImageOutsideTargetDomain : public Error {
public:
    using Error::Error;
};

class NotHarmonicAtPoint : public Error {
public:
    using Error::Error;
};

class NotHarmonicOnSupport : public Error {
public:
    using Error::Error;
};

class NotBiharmonicOnSupport : public Error {
public:
    using Error::Error;
};

class NotRadial : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace slab
