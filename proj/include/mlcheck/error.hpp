#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlcheck {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid schema document or schema invariant violation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Syntax or resolution error in a condition string or property file.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at offset " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A well-formed property that breaks a PropertySpec invariant.
class PropertyError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  enum class Kind { invalid_request, handshake, label_mismatch, protocol, timeout, died };

  OracleError(Kind kind, const std::string& message, std::string request = {})
      : Error(message), kind_(kind), request_(std::move(request)) {}

  Kind kind() const { return kind_; }
  /// The request line that was in flight, if any.
  const std::string& request() const { return request_; }

 private:
  Kind kind_;
  std::string request_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& message, std::string raw_output)
      : Error(message), raw_(std::move(raw_output)) {}

  const std::string& raw_output() const { return raw_; }

 private:
  std::string raw_;
};

}  // namespace mlcheck
