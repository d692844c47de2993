#pragma once

#include <stdexcept>
#include <string>

namespace collq {

/// Base class for every error this library reports deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An expression node (or plan) violates a typing rule.
class TypingError : public Error {
public:
    TypingError(const std::string& where, const std::string& expected,
                const std::string& found)
        : Error("type error at " + where + ": expected " + expected +
                ", found " + found) {}
    explicit TypingError(const std::string& msg) : Error(msg) {}
};

/// rebuild() received the wrong number of children.
class ArityError : public Error {
public:
    explicit ArityError(const std::string& msg) : Error(msg) {}
};

/// A runtime Value does not conform to the TypeTag it was paired with.
class ValueTagMismatch : public Error {
public:
    explicit ValueTagMismatch(const std::string& msg) : Error(msg) {}
};

/// Schema registration failure (duplicate schema/field, unknown reference).
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

/// Textual input (plan text, descriptor, data document) failed to parse.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& reason)
        : Error("parse error at line " + std::to_string(line) + ": " + reason),
          line_(line) {}
    explicit ParseError(const std::string& reason)
        : Error("parse error: " + reason), line_(0) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Structurally valid data that does not fit the declared schema/roots.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

/// Runtime evaluation failure (unbound variable, division by zero).
class EvalError : public Error {
public:
    explicit EvalError(const std::string& msg) : Error(msg) {}
};

class UnboundVariable : public EvalError {
public:
    explicit UnboundVariable(int id)
        : EvalError("unbound variable " + std::to_string(id)) {}
};

class DivisionByZero : public EvalError {
public:
    DivisionByZero() : EvalError("division by zero") {}
};

/// A rewrite fixpoint failed to stabilize within its round cap.
/// Signals an optimizer bug, never expected on valid input.
class IterationLimitExceeded : public Error {
public:
    explicit IterationLimitExceeded(const std::string& msg) : Error(msg) {}
};

} // namespace collq
