#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mokit {

// Invalid argument to a numerical operation (negative u, a <= 0, NaN, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold for its inputs,
// e.g. b_{phi1}(t) = 0 somewhere so that supp L^{phi1} is not the whole space.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A numerical search did not reach its contract (equality point not found,
// degenerate split). Never silently approximated.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed family expression or scenario file. Line/column are 1-based;
// zero means "not applicable".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(format(message, line, column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t column) {
        if (line == 0) {
            return column == 0 ? message : "column " + std::to_string(column) + ": " + message;
        }
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    }

    std::size_t line_;
    std::size_t column_;
};

}  // namespace mokit
