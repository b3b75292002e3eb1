#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mktsym {

// Series or input too short / mismatched lengths.
class LengthError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Argument outside its documented domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Failures of a file row carry the 1-based line number of the offending row.
class RowError : public std::runtime_error {
public:
    RowError(const std::string& what, std::size_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ParseError : public RowError {
public:
    using RowError::RowError;
};

class ValidationError : public RowError {
public:
    using RowError::RowError;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A perturbation left the linear-response regime before the fit window closed.
class RegimeError : public NumericError {
public:
    using NumericError::NumericError;
};

class FitError : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularParameterError : public NumericError {
public:
    using NumericError::NumericError;
};

class SharpeUndefinedError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace mktsym
