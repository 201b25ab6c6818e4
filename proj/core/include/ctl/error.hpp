#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was applied outside its domain (log of a non-positive jet, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested beyond what the jet order can supply.
class JetOrderError : public Error {
 public:
  using Error::Error;
};

/// Operands with incompatible dimension, order or rank.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Expression text that does not match the grammar.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Malformed geometry description or metric that is not positive definite.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A computation needs u, f, X or lambda and the geometry does not carry it.
class MissingIngredient : public Error {
 public:
  using Error::Error;
};

/// A catalog entry failed its structural self-check.
class CertificationError : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration (unknown names, malformed options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctl
