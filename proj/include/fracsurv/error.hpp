#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsurv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required column is absent from the header row.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::string column)
      : Error("missing column '" + column + "'"), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

// Errors tied to one data row. Rows are numbered from 1, header excluded.
class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
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

// No observed events: nothing about the quantile function is estimable.
class EmptyEventsError : public Error {
 public:
  explicit EmptyEventsError(std::string group = {})
      : Error(group.empty() ? std::string("dataset has no observed events")
                            : "group '" + group + "' has no observed events"),
        group_(std::move(group)) {}
  const std::string& group() const noexcept { return group_; }

 private:
  std::string group_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BandUndefinedError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracsurv
