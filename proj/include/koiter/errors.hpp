#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace koiter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that fails a documented precondition (bad config, bad field id, ...).
/// The command line maps these to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

/// Failure of the numerics themselves. The command line maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DegenerateChart : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFiniteEnergy : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFiniteState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateWindow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BadGridSize : public InputError {
public:
    using InputError::InputError;
};

class BadFieldSpec : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

/// A path failed inside an ensemble; carries the failing path index.
class PathError : public Error {
public:
    PathError(std::size_t path, const std::string& what)
        : Error("path " + std::to_string(path) + ": " + what), path_(path) {}

    std::size_t path() const noexcept { return path_; }

private:
    std::size_t path_;
};

} // namespace koiter
