#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridfusion {

/// Thrown when a domain type would be constructed with broken invariants.
struct InvariantError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Structured parse failure. Line and column are 1-based; 0 means "not
/// applicable" (e.g. a missing key has no location).
class ParseError : public std::runtime_error {
public:
    enum class Kind {
        MissingKey,
        WrongArity,
        MalformedNumber,
        MalformedRecord,
        InvariantViolation,
        StaticWithVelocity,
    };

    ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(message), kind_(kind), line_(line), column_(column) {}

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

struct EmptyAssignmentError : std::logic_error {
    EmptyAssignmentError() : std::logic_error("region assignment holds no points") {}
};

struct EmptyInputError : std::logic_error {
    EmptyInputError() : std::logic_error("median of an empty list") {}
};

struct ZeroVelocityError : std::domain_error {
    ZeroVelocityError() : std::domain_error("heading is undefined for zero velocity") {}
};

/// A synthetic object cannot be placed in front of the camera or inside the
/// image with the given calibration.
struct UnprojectableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gridfusion
