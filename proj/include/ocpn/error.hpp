// Copyright 2026 The ocpn Authors.
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ocpn {

/// Base class for every error raised by the library. Anything deriving from
/// Error is a data/model problem (as opposed to a programming error).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A name (object type, activity, place, transition) that does not exist.
class UnknownNameError : public Error {
public:
  using Error::Error;
};

/// Malformed input document. `row` and `column` are 1-based when known, 0 otherwise.
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

/// A transition or binding was fired in a marking that does not enable it.
class NotEnabledError : public Error {
public:
  using Error::Error;
};

/// A bounded state-space exploration hit its cap before finishing.
class ExplorationLimitError : public Error {
public:
  using Error::Error;
};

/// Invalid argument value (thresholds out of range, inconsistent population, ...).
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

}  // namespace ocpn
