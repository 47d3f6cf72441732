#pragma once

#include <stdexcept>
#include <string>

namespace mirrorsim {

// Base of everything the library throws on bad input or failed numerics.
// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition or invariant on a physical quantity was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// Malformed or incompatible input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Command-line or configuration misuse (exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace mirrorsim
