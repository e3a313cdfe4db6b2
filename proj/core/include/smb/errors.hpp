#pragma once

#include <stdexcept>
#include <string>

namespace smb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two derivations (or a derivation and a tree) do not fit together.
class InvalidComposition : public Error {
 public:
  using Error::Error;
};

/// An operation needed an inhabitant of an index code that has none.
class EmptyIndex : public Error {
 public:
  using Error::Error;
};

/// An operation required an uninhabited index code.
class NonEmptyIndex : public Error {
 public:
  using Error::Error;
};

/// A strict-order witness has a root rule that no valid derivation can have.
class MalformedWitness : public Error {
 public:
  using Error::Error;
};

/// A recursive call supplied a decrease witness that failed its audit.
class DescentViolation : public Error {
 public:
  DescentViolation(std::string path, const std::string& reason)
      : Error("descent witness rejected at " + path + ": " + reason), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// An idempotence witness of an SMB-tree did not pass its audit.
class InvalidWitness : public Error {
 public:
  using Error::Error;
};

/// Recursion ran past the configured step bound.
class WatchdogTripped : public Error {
 public:
  using Error::Error;
};

/// A bounded proof search gave up on a branch it had promised lazily.
class SearchFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string expected, const std::string& message)
      : Error("parse error at " + std::to_string(position) + ": " + message + " (expected " +
              expected + ")"),
        position_(position),
        expected_(std::move(expected)) {}
  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name) : Error("unbound variable '" + name + "'") {}
};

class DeserializeError : public Error {
 public:
  using Error::Error;
};

}  // namespace smb
