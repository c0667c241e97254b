#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ueassign {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 means "no specific line".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value outside its admissible range (negative flow, zero capacity, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two links share the same ordered (tail, head) pair.
class DuplicateLinkError : public Error {
 public:
  using Error::Error;
};

/// The demand cannot be routed: unbalanced injections or unreachable destinations.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A node carrying demand is not connected to the pinned node.
class DisconnectedError : public InfeasibleError {
 public:
  DisconnectedError(const std::string& message, std::size_t node)
      : InfeasibleError(message), node_(node) {}

  /// 0-based node index.
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// The reduced Laplacian is numerically singular.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

}  // namespace ueassign
