#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdclt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (ragged rows, missing header, unreadable file).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A cell that could not be parsed as a real number.
class ParseError : public FormatError {
public:
    ParseError(std::size_t row, std::string column, const std::string& cell)
        : FormatError("cannot parse '" + cell + "' at row " + std::to_string(row) +
                      ", column '" + column + "'"),
          row_(row), column_(std::move(column)) {}

    /// 1-based data row (the header is row 0).
    [[nodiscard]] std::size_t row() const noexcept { return row_; }
    [[nodiscard]] const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Statistical degeneracy: zero variance, singular design, and similar.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Factorization or other numerical failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Operation not available for the given generator kind.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace hdclt
