#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snlab {

// Violated operation precondition (bad argument combination).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative numerics that did not reach the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Text input that could not be parsed; line is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace snlab
