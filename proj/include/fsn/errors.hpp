#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fsn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable tabular input. `row` is 1-based (header = row 1),
/// 0 when the problem is not tied to a row.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::string column = {})
        : Error(what), row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class DegenerateNetwork : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its sweep limit. The last iterate is kept so callers
/// can still inspect or accept it.
class IterationLimit : public Error {
public:
    IterationLimit(const std::string& what, std::vector<double> last_iterate, int iterations)
        : Error(what), last_(std::move(last_iterate)), iterations_(iterations) {}

    const std::vector<double>& last_iterate() const noexcept { return last_; }
    int iterations() const noexcept { return iterations_; }

private:
    std::vector<double> last_;
    int iterations_;
};

class DegenerateFeature : public Error {
public:
    DegenerateFeature(const std::string& what, std::string column)
        : Error(what), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class SingularDesign : public Error {
public:
    SingularDesign(const std::string& what, std::vector<std::string> columns)
        : Error(what), columns_(std::move(columns)) {}
    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::vector<std::string> columns_;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

}  // namespace fsn
