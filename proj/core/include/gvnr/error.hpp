#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gvnr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Precondition violated by the caller (bad index, empty set, bad fraction...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingDiverged : public Error {
public:
    using Error::Error;
};

/// File could not be opened or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gvnr
