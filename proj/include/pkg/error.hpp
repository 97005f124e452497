#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkg {

/// Base for every error the engine raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A single failed invariant, addressed by a dotted field path.
struct Violation {
    std::string field;
    std::string message;

    bool operator==(const Violation&) const = default;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    ValidationError(std::string field, std::string message);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Raised when a quad set does not contain a complete reified statement.
class StructuralError : public Error {
public:
    explicit StructuralError(std::vector<std::string> missing);

    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t line_;
    std::size_t column_;
};

class StoreError : public Error {
public:
    using Error::Error;
};

class UnsupportedAction : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace pkg
