#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cbc {

/// Base class of every exception thrown by the coordinator core.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed catalog or scenario text. Line and column are 1-based, 0 when
/// the position is unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, int column = 0);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Catalog text parsed but violates one or more model invariants.
class CatalogError : public Error {
 public:
  explicit CatalogError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class UnknownNameError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A resource cap was exceeded (e.g. oracle enumeration size).
class LimitError : public Error {
 public:
  using Error::Error;
};

/// Activation management refused a request (double activation, infeasible
/// situation, deactivating an inactive behavior).
class HarnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbc
