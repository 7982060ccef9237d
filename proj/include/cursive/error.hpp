#pragma once

#include <stdexcept>
#include <string>

namespace cursive {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem access failed.
class IoError : public Error {
public:
    using Error::Error;
};

// Input bytes do not parse as the expected format.
class FormatError : public Error {
public:
    using Error::Error;
};

// A precondition on arguments was violated (dimension mismatch, empty data...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace cursive
