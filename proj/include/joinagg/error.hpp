#pragma once

#include <stdexcept>
#include <string>

namespace joinagg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files (query spec, relation CSV). Carries a 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class CyclicQueryError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A trial exceeded its row budget (used by the doubling wrapper).
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// An internal invariant of an algorithm was violated; indicates a bug, not bad input.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace joinagg
