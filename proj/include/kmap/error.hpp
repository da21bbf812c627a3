#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A malformed input record. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Referential or structural integrity violated (dangling ids, manifest mismatch, ...).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A node, entity or document id that the graph does not know.
class UnknownIdError : public Error {
 public:
  explicit UnknownIdError(const std::string& id) : Error("unknown id '" + id + "'"), id_(id) {}
  UnknownIdError(const std::string& id, const std::string& context)
      : Error(context + ": unknown id '" + id + "'"), id_(id) {}

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace kmap
