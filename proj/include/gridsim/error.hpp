#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridsim {

/// Base class for every error raised by the library.
class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public GridError {
public:
    using GridError::GridError;
};

class NoRoute : public GridError {
public:
    using GridError::GridError;
};

class NoCandidate : public GridError {
public:
    using GridError::GridError;
};

class InvalidSchedule : public GridError {
public:
    using GridError::GridError;
};

class InsufficientShares : public GridError {
public:
    using GridError::GridError;
};

class VersionConflict : public GridError {
public:
    using GridError::GridError;
};

class IncomparableInput : public GridError {
public:
    using GridError::GridError;
};

/// Malformed JSON text; line and column are 1-based.
class ParseError : public GridError {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : GridError(what), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Raised by config validation; carries every violation found, not just the first.
class ValidationError : public GridError {
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

}  // namespace gridsim
